#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace graphbus::detail {

/// Work-stealing thread pool. Each worker owns a queue; submissions from a
/// worker thread land on its own queue, external submissions are spread
/// round-robin. A worker out of local work steals from the back of its
/// peers' queues before sleeping.
class TaskPool {
 public:
  using Task = std::function<void()>;

  explicit TaskPool(unsigned workers);
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  /// Callable from any thread, including pool workers.
  void submit(Task task);

  /// Runs every task already submitted, then joins the workers.
  void stop_and_join();

  unsigned worker_count() const noexcept {
    return static_cast<unsigned>(queues_.size());
  }

 private:
  struct Queue {
    std::mutex mu;
    std::deque<Task> tasks;
  };

  void worker_main(unsigned index);
  bool try_pop(unsigned index, Task& out);

  std::vector<std::unique_ptr<Queue>> queues_;
  std::vector<std::thread> workers_;

  std::mutex sleep_mu_;
  std::condition_variable sleep_cv_;
  std::size_t ready_ = 0;  // submitted and not yet popped
  bool stopping_ = false;

  std::atomic<unsigned> next_queue_{0};
};

}  // namespace graphbus::detail

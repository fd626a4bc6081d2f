#include "task_pool.hpp"

#include <atomic>

namespace graphbus::detail {
namespace {

// Which pool queue the current thread owns, if any. One pool per graph and
// one graph per runtime makes a single slot sufficient; nested pools are not
// a supported configuration.
thread_local const void* tl_pool = nullptr;
thread_local unsigned tl_index = 0;

}  // namespace

TaskPool::TaskPool(unsigned workers) {
  if (workers == 0) workers = 1;
  queues_.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) {
    queues_.push_back(std::make_unique<Queue>());
  }
  workers_.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) {
    workers_.emplace_back([this, i] { worker_main(i); });
  }
}

TaskPool::~TaskPool() { stop_and_join(); }

void TaskPool::submit(Task task) {
  unsigned index;
  if (tl_pool == this) {
    index = tl_index;
  } else {
    index = next_queue_.fetch_add(1, std::memory_order_relaxed) %
            queues_.size();
  }
  // ready_ goes up before the task becomes visible, so it never undercounts
  // the queues; workers tolerate the brief overcount by re-polling.
  {
    std::lock_guard lock(sleep_mu_);
    ++ready_;
  }
  {
    std::lock_guard lock(queues_[index]->mu);
    queues_[index]->tasks.push_back(std::move(task));
  }
  sleep_cv_.notify_one();
}

bool TaskPool::try_pop(unsigned index, Task& out) {
  // Own queue first, then sweep the others (steal from the back).
  {
    Queue& q = *queues_[index];
    std::lock_guard lock(q.mu);
    if (!q.tasks.empty()) {
      out = std::move(q.tasks.front());
      q.tasks.pop_front();
      return true;
    }
  }
  for (std::size_t k = 1; k < queues_.size(); ++k) {
    Queue& q = *queues_[(index + k) % queues_.size()];
    std::lock_guard lock(q.mu);
    if (!q.tasks.empty()) {
      out = std::move(q.tasks.back());
      q.tasks.pop_back();
      return true;
    }
  }
  return false;
}

void TaskPool::worker_main(unsigned index) {
  tl_pool = this;
  tl_index = index;
  for (;;) {
    Task task;
    if (try_pop(index, task)) {
      {
        std::lock_guard lock(sleep_mu_);
        --ready_;
      }
      task();
      continue;
    }
    std::unique_lock lock(sleep_mu_);
    sleep_cv_.wait(lock, [this] { return ready_ > 0 || stopping_; });
    if (stopping_ && ready_ == 0) return;
  }
}

void TaskPool::stop_and_join() {
  {
    std::lock_guard lock(sleep_mu_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
  }
  sleep_cv_.notify_all();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
}

}  // namespace graphbus::detail

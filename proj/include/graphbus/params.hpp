#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "graphbus/errors.hpp"

namespace graphbus {

/// One configuration value: scalar, list, or string-keyed map. Maps preserve
/// insertion order. There is no implicit coercion between kinds (an integer
/// is never a real and vice versa).
class ParamValue {
 public:
  using List = std::vector<ParamValue>;
  using Map = std::vector<std::pair<std::string, ParamValue>>;

  enum class Kind { boolean, integer, real, text, list, map };

  ParamValue() : v_(std::string{}) {}
  ParamValue(bool b) : v_(b) {}
  ParamValue(std::int64_t i) : v_(i) {}
  ParamValue(int i) : v_(static_cast<std::int64_t>(i)) {}
  ParamValue(double d) : v_(d) {}
  ParamValue(std::string s) : v_(std::move(s)) {}
  ParamValue(const char* s) : v_(std::string(s)) {}
  ParamValue(List l) : v_(std::move(l)) {}
  ParamValue(Map m) : v_(std::move(m)) {}

  Kind kind() const noexcept { return static_cast<Kind>(v_.index()); }
  const char* kind_name() const noexcept;

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;
  const std::string& as_string() const;
  const List& as_list() const;
  const Map& as_map() const;
  Map& as_map();

  /// Map member lookup; nullptr when absent or when this is not a map.
  const ParamValue* find(std::string_view key) const noexcept;

  friend bool operator==(const ParamValue&, const ParamValue&) = default;

 private:
  [[noreturn]] void kind_error(Kind wanted) const;

  std::variant<bool, std::int64_t, double, std::string, List, Map> v_;
};

/// Parses one scalar/value in config syntax ("3" -> integer, "3.5" -> real,
/// "true" -> boolean, quoted or non-numeric text -> string, plus lists and
/// maps). Used for CLI --param overrides.
ParamValue parse_param_value(const std::string& text);

/// File-backed key/value store with runtime get/set. Keys are dotted paths
/// into nested maps ("a.b.c"); lookups are exact-match on the path. Many
/// concurrent readers, serialized writers.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(ParameterStore&& other) noexcept;
  ParameterStore& operator=(ParameterStore&& other) noexcept;

  /// Loads a YAML file. Duplicate keys: last wins, with a warning.
  /// Throws Error(config_parse) with file/position diagnostics.
  static ParameterStore load(const std::filesystem::path& path);

  /// Same parser over in-memory text; `origin` seasons diagnostics.
  static ParameterStore parse(const std::string& text,
                              const std::string& origin = "<string>");

  /// Serializes every entry; load(save(x)) reproduces the store.
  void save(const std::filesystem::path& path) const;
  std::string to_yaml() const;

  /// Whole-value read; nullopt when the path is absent.
  std::optional<ParamValue> get(std::string_view dotted_key) const;

  // Typed reads: nullopt when absent, Error(type_mismatch) when the entry
  // exists with a different kind.
  std::optional<bool> get_bool(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::string> get_string(std::string_view key) const;

  /// Creates or overwrites; intermediate map levels are created on demand.
  /// Visible to all subsequent gets from any thread; bumps generation().
  /// Throws Error(type_mismatch) when an intermediate level is not a map.
  void set(std::string_view dotted_key, ParamValue value);

  std::uint64_t generation() const noexcept { return generation_.load(); }

  /// Flattened dotted paths of every leaf entry.
  std::vector<std::string> keys() const;

  ParamValue root_snapshot() const;

 private:
  template <class T>
  std::optional<T> typed_get(std::string_view key, ParamValue::Kind kind,
                             T (*extract)(const ParamValue&)) const;

  mutable std::shared_mutex mu_;
  ParamValue root_{ParamValue::Map{}};
  std::atomic<std::uint64_t> generation_{0};
};

}  // namespace graphbus

#include "graphbus/params.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "graphbus/log.hpp"

namespace graphbus {

const char* ParamValue::kind_name() const noexcept {
  switch (kind()) {
    case Kind::boolean: return "bool";
    case Kind::integer: return "int";
    case Kind::real: return "double";
    case Kind::text: return "string";
    case Kind::list: return "list";
    case Kind::map: return "map";
  }
  return "?";
}

void ParamValue::kind_error(Kind wanted) const {
  const char* names[] = {"bool", "int", "double", "string", "list", "map"};
  raise(Errc::type_mismatch,
        std::string("parameter holds ") + kind_name() + ", requested " +
            names[static_cast<int>(wanted)]);
}

bool ParamValue::as_bool() const {
  if (auto* p = std::get_if<bool>(&v_)) return *p;
  kind_error(Kind::boolean);
}

std::int64_t ParamValue::as_int() const {
  if (auto* p = std::get_if<std::int64_t>(&v_)) return *p;
  kind_error(Kind::integer);
}

double ParamValue::as_double() const {
  if (auto* p = std::get_if<double>(&v_)) return *p;
  kind_error(Kind::real);
}

const std::string& ParamValue::as_string() const {
  if (auto* p = std::get_if<std::string>(&v_)) return *p;
  kind_error(Kind::text);
}

const ParamValue::List& ParamValue::as_list() const {
  if (auto* p = std::get_if<List>(&v_)) return *p;
  kind_error(Kind::list);
}

const ParamValue::Map& ParamValue::as_map() const {
  if (auto* p = std::get_if<Map>(&v_)) return *p;
  kind_error(Kind::map);
}

ParamValue::Map& ParamValue::as_map() {
  if (auto* p = std::get_if<Map>(&v_)) return *p;
  kind_error(Kind::map);
}

const ParamValue* ParamValue::find(std::string_view key) const noexcept {
  auto* m = std::get_if<Map>(&v_);
  if (m == nullptr) return nullptr;
  for (const auto& [k, v] : *m) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

ParamValue convert_node(const YAML::Node& node, const std::string& origin);

ParamValue convert_scalar(const YAML::Node& node) {
  // Quoted scalars keep their string-ness; plain scalars are inferred in
  // the usual order. No coercion happens after this point.
  if (node.Tag() == "!") return ParamValue(node.Scalar());
  const std::string& s = node.Scalar();
  if (s == "null" || s == "~" || s.empty()) return ParamValue(std::string{});
  if (s == "true" || s == "True") return ParamValue(true);
  if (s == "false" || s == "False") return ParamValue(false);
  try {
    std::size_t used = 0;
    std::int64_t i = std::stoll(s, &used, 10);
    if (used == s.size()) return ParamValue(i);
  } catch (...) {
  }
  try {
    std::size_t used = 0;
    double d = std::stod(s, &used);
    if (used == s.size() && std::isfinite(d)) return ParamValue(d);
  } catch (...) {
  }
  return ParamValue(s);
}

ParamValue convert_node(const YAML::Node& node, const std::string& origin) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return ParamValue(std::string{});
    case YAML::NodeType::Scalar:
      return convert_scalar(node);
    case YAML::NodeType::Sequence: {
      ParamValue::List list;
      list.reserve(node.size());
      for (const auto& item : node) list.push_back(convert_node(item, origin));
      return ParamValue(std::move(list));
    }
    case YAML::NodeType::Map: {
      ParamValue::Map map;
      for (const auto& kv : node) {
        std::string key = kv.first.Scalar();
        ParamValue value = convert_node(kv.second, origin);
        bool replaced = false;
        for (auto& [k, v] : map) {
          if (k == key) {
            log::warn(origin + ": duplicate key '" + key +
                      "', keeping the last value");
            v = std::move(value);
            replaced = true;
            break;
          }
        }
        if (!replaced) map.emplace_back(std::move(key), std::move(value));
      }
      return ParamValue(std::move(map));
    }
  }
  return ParamValue(std::string{});
}

void emit_value(YAML::Emitter& out, const ParamValue& v) {
  switch (v.kind()) {
    case ParamValue::Kind::boolean:
      out << v.as_bool();
      break;
    case ParamValue::Kind::integer:
      out << v.as_int();
      break;
    case ParamValue::Kind::real:
      out << v.as_double();
      break;
    case ParamValue::Kind::text:
      out << YAML::DoubleQuoted << v.as_string();
      break;
    case ParamValue::Kind::list:
      out << YAML::BeginSeq;
      for (const auto& item : v.as_list()) emit_value(out, item);
      out << YAML::EndSeq;
      break;
    case ParamValue::Kind::map:
      out << YAML::BeginMap;
      for (const auto& [k, item] : v.as_map()) {
        out << YAML::Key << k << YAML::Value;
        emit_value(out, item);
      }
      out << YAML::EndMap;
      break;
  }
}

std::vector<std::string_view> split_path(std::string_view dotted) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    std::size_t dot = dotted.find('.', start);
    if (dot == std::string_view::npos) {
      parts.push_back(dotted.substr(start));
      break;
    }
    parts.push_back(dotted.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

void collect_keys(const ParamValue& v, const std::string& prefix,
                  std::vector<std::string>& out) {
  if (v.kind() == ParamValue::Kind::map) {
    for (const auto& [k, item] : v.as_map()) {
      collect_keys(item, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else {
    out.push_back(prefix);
  }
}

}  // namespace

ParamValue parse_param_value(const std::string& text) {
  try {
    YAML::Node node = YAML::Load(text);
    return convert_node(node, "<override>");
  } catch (const YAML::Exception& e) {
    raise(Errc::config_parse,
          std::string("cannot parse parameter value: ") + e.what());
  }
}

ParameterStore::ParameterStore(ParameterStore&& other) noexcept {
  std::unique_lock lock(other.mu_);
  root_ = std::move(other.root_);
  generation_.store(other.generation_.load());
}

ParameterStore& ParameterStore::operator=(ParameterStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    root_ = std::move(other.root_);
    generation_.store(other.generation_.load());
  }
  return *this;
}

ParameterStore ParameterStore::parse(const std::string& text,
                                     const std::string& origin) {
  ParameterStore store;
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    raise(Errc::config_parse, origin + ": " + e.what());
  }
  if (node.IsNull() || !node.IsDefined()) {
    return store;  // empty file -> empty store
  }
  if (!node.IsMap()) {
    raise(Errc::config_parse, origin + ": top level must be a mapping");
  }
  store.root_ = convert_node(node, origin);
  return store;
}

ParameterStore ParameterStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::config_parse, "cannot open " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

std::string ParameterStore::to_yaml() const {
  std::shared_lock lock(mu_);
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out.SetFloatPrecision(9);
  emit_value(out, root_);
  std::string text = out.c_str() ? out.c_str() : "";
  text += "\n";
  return text;
}

void ParameterStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    raise(Errc::io_error, "cannot write " + path.string());
  }
  out << to_yaml();
}

std::optional<ParamValue> ParameterStore::get(std::string_view key) const {
  if (key.empty()) return std::nullopt;
  std::shared_lock lock(mu_);
  const ParamValue* cur = &root_;
  for (std::string_view part : split_path(key)) {
    cur = cur->find(part);
    if (cur == nullptr) return std::nullopt;
  }
  return *cur;
}

std::optional<bool> ParameterStore::get_bool(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return v->as_bool();
}

std::optional<std::int64_t> ParameterStore::get_int(
    std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return v->as_int();
}

std::optional<double> ParameterStore::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return v->as_double();
}

std::optional<std::string> ParameterStore::get_string(
    std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return v->as_string();
}

void ParameterStore::set(std::string_view key, ParamValue value) {
  if (key.empty()) {
    raise(Errc::invalid_argument, "parameter key must be non-empty");
  }
  auto parts = split_path(key);
  std::unique_lock lock(mu_);
  ParamValue* cur = &root_;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (cur->kind() != ParamValue::Kind::map) {
      raise(Errc::type_mismatch,
            "parameter path '" + std::string(key) +
                "' crosses a non-map entry");
    }
    auto& map = cur->as_map();
    ParamValue* next = nullptr;
    for (auto& [k, v] : map) {
      if (k == parts[i]) {
        next = &v;
        break;
      }
    }
    if (next == nullptr) {
      map.emplace_back(std::string(parts[i]), ParamValue(ParamValue::Map{}));
      next = &map.back().second;
    }
    cur = next;
  }
  if (cur->kind() != ParamValue::Kind::map) {
    raise(Errc::type_mismatch,
          "parameter path '" + std::string(key) + "' crosses a non-map entry");
  }
  auto& map = cur->as_map();
  bool replaced = false;
  for (auto& [k, v] : map) {
    if (k == parts.back()) {
      v = std::move(value);
      replaced = true;
      break;
    }
  }
  if (!replaced) map.emplace_back(std::string(parts.back()), std::move(value));
  generation_.fetch_add(1, std::memory_order_acq_rel);
}

std::vector<std::string> ParameterStore::keys() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  collect_keys(root_, "", out);
  return out;
}

ParamValue ParameterStore::root_snapshot() const {
  std::shared_lock lock(mu_);
  return root_;
}

}  // namespace graphbus

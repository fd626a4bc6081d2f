#include "graphbus/net_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace graphbus {

Uri parse_uri(const std::string& text) {
  Uri uri;
  uri.text = text;
  auto sep = text.find("://");
  if (sep == std::string::npos) {
    raise(Errc::invalid_uri,
          "'" + text +
              "' is not an endpoint URI (expected tcp://host:port or "
              "ipc://path); fill in the real address instead of a "
              "placeholder");
  }
  uri.scheme = text.substr(0, sep);
  std::string rest = text.substr(sep + 3);
  if (uri.scheme == "tcp") {
    auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 ||
        colon + 1 == rest.size()) {
      raise(Errc::invalid_uri,
            "'" + text + "': tcp endpoints need host:port");
    }
    uri.host = rest.substr(0, colon);
    std::string port_text = rest.substr(colon + 1);
    try {
      std::size_t used = 0;
      unsigned long port = std::stoul(port_text, &used, 10);
      if (used != port_text.size() || port > 65535) throw std::out_of_range("");
      uri.port = static_cast<std::uint16_t>(port);
    } catch (...) {
      raise(Errc::invalid_uri,
            "'" + text + "': '" + port_text + "' is not a valid port");
    }
  } else if (uri.scheme == "ipc") {
    if (rest.empty()) {
      raise(Errc::invalid_uri, "'" + text + "': ipc endpoints need a path");
    }
    uri.path = rest;
  } else {
    raise(Errc::invalid_uri,
          "'" + text + "': scheme '" + uri.scheme +
              "' is not supported (tcp, ipc)");
  }
  return uri;
}

namespace {

std::vector<ChannelId> parse_channels(const YAML::Node& node,
                                      const std::string& where) {
  std::vector<ChannelId> out;
  if (!node) return out;
  if (!node.IsSequence()) {
    raise(Errc::config_parse, where + ": channels must be a list");
  }
  for (const auto& item : node) {
    if (!item.IsScalar()) {
      raise(Errc::config_parse, where + ": channel entries must be strings");
    }
    try {
      out.emplace_back(item.Scalar());
    } catch (const Error& e) {
      raise(Errc::config_parse,
            where + ": bad channel '" + item.Scalar() + "': " + e.what());
    }
  }
  return out;
}

NetworkConfig::Endpoint parse_endpoint(const YAML::Node& node,
                                       const std::string& where,
                                       bool is_publisher) {
  NetworkConfig::Endpoint ep;
  if (!node.IsMap()) {
    raise(Errc::config_parse, where + ": must be a mapping with ip, channels");
  }
  YAML::Node ip = node["ip"];
  if (!ip || !ip.IsScalar()) {
    raise(Errc::config_parse, where + ": missing 'ip' endpoint string");
  }
  ep.uri = parse_uri(ip.Scalar());
  if (!is_publisher && ep.uri.is_tcp() && ep.uri.host == "*") {
    raise(Errc::invalid_uri,
          where + ": subscriber endpoints must name a concrete host, not '*'");
  }
  if (!is_publisher && ep.uri.is_tcp() && ep.uri.port == 0) {
    raise(Errc::invalid_uri,
          where + ": subscriber endpoints need an explicit port");
  }
  ep.channels = parse_channels(node["channels"], where);
  return ep;
}

}  // namespace

NetworkConfig parse_network_config(const std::string& text,
                                   const std::string& origin) {
  NetworkConfig config;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    raise(Errc::config_parse, origin + ": " + e.what());
  }
  if (!root.IsDefined() || root.IsNull()) return config;
  if (!root.IsMap()) {
    raise(Errc::config_parse, origin + ": top level must be a mapping");
  }
  YAML::Node network = root["network"];
  if (!network || network.IsNull()) {
    return config;  // no network section: pure intra-process operation
  }
  if (!network.IsMap()) {
    raise(Errc::config_parse, origin + ": 'network' must be a mapping");
  }
  if (YAML::Node pub = network["publisher"]) {
    config.publisher = parse_endpoint(pub, origin + ": network.publisher",
                                      /*is_publisher=*/true);
    std::unordered_set<std::string> seen;
    for (const auto& c : config.publisher->channels) {
      if (!seen.insert(c.name()).second) {
        raise(Errc::config_parse,
              origin + ": network.publisher.channels lists '" + c.name() +
                  "' twice");
      }
    }
  }
  if (YAML::Node subs = network["subscribers"]) {
    if (!subs.IsSequence()) {
      raise(Errc::config_parse,
            origin + ": 'network.subscribers' must be a list");
    }
    std::size_t i = 0;
    for (const auto& sub : subs) {
      config.subscribers.push_back(parse_endpoint(
          sub, origin + ": network.subscribers[" + std::to_string(i) + "]",
          /*is_publisher=*/false));
      ++i;
    }
  }
  return config;
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::config_parse, "cannot open " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_network_config(text.str(), path.string());
}

}  // namespace graphbus

#include "swarm/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace swarm {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' &&
        c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigMap ConfigMap::parse_string(const std::string& text,
                                  const std::string& origin) {
  ConfigMap out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": bad key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": empty value for '" + key + "'");
    }
    auto [it, inserted] = out.entries_.insert({key, {value, line_no, false}});
    if (!inserted) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "' (first at line " +
                        std::to_string(it->second.line) + ")");
    }
  }
  return out;
}

bool ConfigMap::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

const ConfigMap::Entry* ConfigMap::find_used(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void ConfigMap::fail(const std::string& key,
                     const std::string& message) const {
  auto it = entries_.find(key);
  std::string at = origin_;
  if (it != entries_.end()) at += ":" + std::to_string(it->second.line);
  throw ConfigError(at + ": " + key + ": " + message);
}

std::string ConfigMap::get_string(const std::string& key) {
  const Entry* e = find_used(key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return e->value;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) {
  const Entry* e = find_used(key);
  return e ? e->value : fallback;
}

double ConfigMap::parse_double(const std::string& key, const Entry& e) const {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": " + key +
                      ": not a number: '" + e.value + "'");
  }
  return v;
}

long ConfigMap::parse_long(const std::string& key, const Entry& e) const {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": " + key +
                      ": not an integer: '" + e.value + "'");
  }
  return v;
}

double ConfigMap::get_double(const std::string& key) {
  const Entry* e = find_used(key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return parse_double(key, *e);
}

double ConfigMap::get_double(const std::string& key, double fallback) {
  const Entry* e = find_used(key);
  return e ? parse_double(key, *e) : fallback;
}

long ConfigMap::get_long(const std::string& key) {
  const Entry* e = find_used(key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return parse_long(key, *e);
}

long ConfigMap::get_long(const std::string& key, long fallback) {
  const Entry* e = find_used(key);
  return e ? parse_long(key, *e) : fallback;
}

std::optional<double> ConfigMap::maybe_double(const std::string& key) {
  const Entry* e = find_used(key);
  if (!e) return std::nullopt;
  return parse_double(key, *e);
}

std::optional<std::string> ConfigMap::maybe_string(const std::string& key) {
  const Entry* e = find_used(key);
  if (!e) return std::nullopt;
  return e->value;
}

void ConfigMap::finish() const {
  std::vector<std::string> stray;
  for (const auto& [key, e] : entries_) {
    if (!e.used) {
      stray.push_back(origin_ + ":" + std::to_string(e.line) +
                      ": unknown key '" + key + "'");
    }
  }
  if (stray.empty()) return;
  std::string msg;
  for (size_t i = 0; i < stray.size(); ++i) {
    if (i) msg += "\n";
    msg += stray[i];
  }
  throw ConfigError(msg);
}

}  // namespace swarm

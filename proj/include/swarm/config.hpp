#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace swarm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value file with '#' comments. Dots in key names are plain
// characters, used by convention to group related keys. Every key must be
// consumed by a getter before finish() is called, so a misspelled key fails
// loudly instead of being silently ignored.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text,
                                const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  long get_long(const std::string& key);
  long get_long(const std::string& key, long fallback);
  std::optional<double> maybe_double(const std::string& key);
  std::optional<std::string> maybe_string(const std::string& key);

  // Throws listing every key that no getter asked for.
  void finish() const;

  const std::string& origin() const { return origin_; }

  // Error text anchored to the line the key appeared on.
  [[noreturn]] void fail(const std::string& key,
                         const std::string& message) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_;

  const Entry* find_used(const std::string& key);
  double parse_double(const std::string& key, const Entry& e) const;
  long parse_long(const std::string& key, const Entry& e) const;
};

}  // namespace swarm

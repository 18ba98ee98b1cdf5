#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cahnlab::cli {

/// Flat key = value configuration. `[section]` lines prefix the keys that
/// follow with "section."; `#` starts a comment.
class Config {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line", "env:NAME", "default" or "flag"
  };

  static Config defaults();

  /// Throws ConfigError("path:line: ...") for syntax errors and unknown keys.
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& name);
  /// Every known key may be overridden by PREFIX + upper-cased key with '.' -> '_'.
  void apply_environment(const std::string& prefix = "CAHNLAB_");
  void set(const std::string& key, const std::string& value, const std::string& origin);

  bool known(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& raw(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::string origin(const std::string& key) const;

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One line per key, "key = value", in key order. Used as the artifact header.
std::vector<std::string> header_lines(const Config& cfg);

}  // namespace cahnlab::cli

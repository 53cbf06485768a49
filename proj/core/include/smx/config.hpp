#pragma once

#include <map>
#include <string>
#include <vector>

namespace smx {

/// Flat key=value run configuration with [section] headers. Lookups use
/// "section.key". Unknown keys are rejected at validation time (fail-fast);
/// every command declares its accepted key set.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Throws PreconditionError naming the first key outside `allowed`.
  void validate_keys(const std::vector<std::string>& allowed) const;

  /// Serialized form, suitable for echoing into the run directory;
  /// re-parsing it reproduces the config exactly.
  std::string to_text() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace smx

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hubcast {

/**
 * Parsed plain-text configuration file.
 *
 * Format: one `key = value` pair per line, `#` starts a comment,
 * blank lines ignored. Keys may repeat; repeated keys keep file order.
 */
class KeyValueFile {
public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;

  // Typed accessors; throw ConfigError naming the key on absence or bad format.
  std::string require(const std::string& key) const;
  long long require_int(const std::string& key) const;
  double require_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  const std::string& origin() const { return origin_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
  std::string origin_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Splits a comma-separated list, trimming whitespace around items.
std::vector<std::string> split_list(const std::string& value);

long long parse_int(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

/// FNV-1a hash of a file's bytes, as a 16-digit hex string (manifests).
std::string file_hash_hex(const std::string& path);

} // namespace hubcast

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ghomog {

/// Flat key-value text with `[section]` headers. `#` starts a comment.
/// Keys are unique within a section; order of sections is preserved.
struct KvDocument {
  std::vector<std::string> section_order;
  std::map<std::string, std::map<std::string, std::string>> sections;

  static KvDocument parse(std::string_view text);
  std::string render() const;

  const std::map<std::string, std::string>* section(const std::string& name) const;
};

// Shortest representation that round-trips.
std::string format_double(double v);

double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);
std::uint64_t parse_uint(const std::string& s, const std::string& what);
bool parse_bool(const std::string& s, const std::string& what);
std::vector<double> parse_double_list(const std::string& s, const std::string& what);

std::string join_doubles(const std::vector<double>& v);

/// FNV-1a, used for config hashes.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace ghomog

#include "ghomog/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ghomog/common.hpp"

namespace ghomog {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::string current;
  int lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": malformed section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (current.empty()) throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": empty section name");
      if (!doc.sections.count(current)) {
        doc.section_order.push_back(current);
        doc.sections[current];
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected key = value");
    if (current.empty())
      throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": key outside of a section");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": empty key");
    auto& sec = doc.sections[current];
    if (sec.count(key))
      throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": duplicate key " + current + "." + key);
    sec[key] = value;
  }
  return doc;
}

std::string KvDocument::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& name : section_order) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [k, v] : sections.at(name)) out << k << " = " << v << '\n';
  }
  return out.str();
}

const std::map<std::string, std::string>* KvDocument::section(const std::string& name) const {
  auto it = sections.find(name);
  return it == sections.end() ? nullptr : &it->second;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "infinity") return INFINITY;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::Config, what + ": expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::Config, what + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::Config, what + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::Config, what + ": expected true/false, got '" + s + "'");
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = trim(std::string_view(s).substr(pos, comma - pos));
    if (item.empty()) throw Error(ErrorCode::Config, what + ": empty list element");
    out.push_back(parse_double(item, what));
    pos = comma + 1;
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ghomog

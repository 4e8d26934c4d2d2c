#include "wbansim/kvtext.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "wbansim/errors.hpp"

namespace wbansim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_ident(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '*';
  });
}

// "a = b" -> "a=b"
std::string squeeze_equals(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      const bool before_eq = j < line.size() && line[j] == '=';
      const bool after_eq = !out.empty() && out.back() == '=';
      if (!before_eq && !after_eq) out += ' ';
      i = j - 1;
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

const KvEntry* KvSection::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::vector<KvSection> parse_kv_text(std::string_view text) {
  std::vector<KvSection> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw ParseError(line_no, "unterminated section header");
      std::string_view inner = trim(line.substr(1, close - 1));
      std::string_view rest = trim(line.substr(close + 1));
      KvSection sec;
      sec.line = line_no;
      const auto sp = inner.find_first_of(" \t");
      sec.kind = std::string(inner.substr(0, sp));
      if (sp != std::string_view::npos) sec.name = std::string(trim(inner.substr(sp)));
      if (!valid_ident(sec.kind)) throw ParseError(line_no, "bad section name");
      if (!sec.name.empty() && !valid_ident(sec.name)) throw ParseError(line_no, "bad section label '" + sec.name + "'");
      sections.push_back(std::move(sec));
      line = rest;
      if (line.empty()) continue;
    }

    if (sections.empty()) throw ParseError(line_no, "entry outside of any section");
    KvSection& sec = sections.back();
    std::istringstream tokens(squeeze_equals(line));
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "expected key=value, got '" + token + "'");
      KvEntry entry{token.substr(0, eq), token.substr(eq + 1), line_no};
      if (!valid_ident(entry.key)) throw ParseError(line_no, "bad key '" + entry.key + "'");
      if (entry.value.empty()) throw ParseError(line_no, "missing value for '" + entry.key + "'");
      if (sec.find(entry.key)) throw ParseError(line_no, "duplicate key '" + entry.key + "'");
      sec.entries.push_back(std::move(entry));
    }
  }
  return sections;
}

double kv_double(const KvEntry& e) {
  double v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  if (b != end && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end || !std::isfinite(v))
    throw ParseError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

long long kv_int(const KvEntry& e) {
  long long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  if (b != end && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end) throw ParseError(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  return v;
}

unsigned long long kv_u64(const KvEntry& e) {
  unsigned long long v = 0;
  auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc{} || p != e.value.data() + e.value.size())
    throw ParseError(e.line, "'" + e.key + "' expects an unsigned integer, got '" + e.value + "'");
  return v;
}

bool kv_bool(const KvEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ParseError(e.line, "'" + e.key + "' expects a boolean, got '" + e.value + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace wbansim

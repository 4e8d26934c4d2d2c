#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wbansim {

// Flat key-value text with section headers:
//
//   # comment
//   [kind optional-name]
//   key=value other=value
//
// Several key=value tokens may share a line. Values cannot contain spaces.
struct KvEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct KvSection {
  std::string kind;
  std::string name;  // empty for unnamed sections
  std::size_t line = 0;
  std::vector<KvEntry> entries;

  const KvEntry* find(std::string_view key) const;
};

// Throws ParseError on malformed lines, entries outside a section and keys
// repeated within one section.
std::vector<KvSection> parse_kv_text(std::string_view text);

// Numeric field readers shared by the file formats; throw ParseError naming
// the line and key on bad input.
double kv_double(const KvEntry& e);
long long kv_int(const KvEntry& e);
unsigned long long kv_u64(const KvEntry& e);
bool kv_bool(const KvEntry& e);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace wbansim

#include "wbansim/units.hpp"

#include <charconv>
#include <cstdlib>

namespace wbansim {

std::string format_ticks(Ticks t) {
  const std::int64_t c = t.count();
  const std::int64_t mag = c < 0 ? -c : c;
  std::string s = c < 0 ? "-" : "";
  s += std::to_string(mag / Ticks::kPerMicrosecond);
  s += '.';
  s += static_cast<char>('0' + mag % Ticks::kPerMicrosecond);
  return s;
}

bool parse_ticks(const std::string& text, Ticks& out) {
  if (text.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-') {
    neg = true;
    i = 1;
  }
  const auto dot = text.find('.', i);
  const std::string whole = text.substr(i, dot == std::string::npos ? std::string::npos : dot - i);
  if (whole.empty()) return false;
  std::int64_t w = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return false;
  std::int64_t frac = 0;
  if (dot != std::string::npos) {
    const std::string f = text.substr(dot + 1);
    if (f.size() != 1 || f[0] < '0' || f[0] > '9') return false;
    frac = f[0] - '0';
  }
  const std::int64_t c = w * Ticks::kPerMicrosecond + frac;
  out = Ticks(neg ? -c : c);
  return true;
}

}  // namespace wbansim

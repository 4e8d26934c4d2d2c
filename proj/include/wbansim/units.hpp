#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace wbansim {

// Simulation time in integer tenths of a microsecond. All probe timestamps and
// event times use this resolution so that interval arithmetic is exact.
class Ticks {
 public:
  static constexpr std::int64_t kPerMicrosecond = 10;

  constexpr Ticks() = default;
  constexpr explicit Ticks(std::int64_t count) : count_(count) {}

  // Rounds to the nearest tick, halves away from zero.
  static Ticks from_us(double us) { return Ticks(std::llround(us * kPerMicrosecond)); }

  constexpr std::int64_t count() const { return count_; }
  constexpr double us() const { return static_cast<double>(count_) / kPerMicrosecond; }

  constexpr Ticks& operator+=(Ticks o) { count_ += o.count_; return *this; }
  constexpr Ticks& operator-=(Ticks o) { count_ -= o.count_; return *this; }
  friend constexpr Ticks operator+(Ticks a, Ticks b) { return Ticks(a.count_ + b.count_); }
  friend constexpr Ticks operator-(Ticks a, Ticks b) { return Ticks(a.count_ - b.count_); }
  friend constexpr Ticks operator*(Ticks a, std::int64_t k) { return Ticks(a.count_ * k); }
  friend constexpr Ticks operator*(std::int64_t k, Ticks a) { return Ticks(a.count_ * k); }
  friend constexpr auto operator<=>(Ticks, Ticks) = default;

 private:
  std::int64_t count_ = 0;
};

// "123.4" with exactly one decimal; round-trips through parse_ticks.
std::string format_ticks(Ticks t);
// Accepts decimal microseconds with at most one fractional digit.
bool parse_ticks(const std::string& text, Ticks& out);

}  // namespace wbansim

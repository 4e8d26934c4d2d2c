#include "wbansim/rng.hpp"

#include <cmath>
#include <numbers>

namespace wbansim {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t stream_key(std::uint64_t seed, const StreamId& id) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  for (std::uint64_t part : {id.round, id.attempt, static_cast<std::uint64_t>(id.purpose)}) {
    s = k ^ part;
    k = splitmix64(s);
  }
  return k;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id) : engine_(stream_key(seed, id)) {}

double RngStream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) {
  const double v = lo + (hi - lo) * uniform01();
  return v < hi ? v : lo;  // guard rounding up to hi
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double RngStream::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace wbansim

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wbansim {

enum class Purpose : std::uint32_t { Loss = 1, Corrupt = 2, Jitter = 3, Dedup = 4, Shuffle = 5, Ble = 6 };

struct StreamId {
  std::uint64_t round = 0;
  std::uint64_t attempt = 0;
  Purpose purpose = Purpose::Loss;
};

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-key";

// Reproducible random stream keyed by (seed, round, attempt, purpose). The key
// is hashed with splitmix64 and seeds a std::mt19937_64, whose output sequence
// is fixed by the standard. Distributions are implemented here rather than
// through <random> adaptors so draws are identical across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform01();
  // [lo, hi)
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  // Standard normal via Box-Muller; one value per call.
  double normal();
  // Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace wbansim

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbansim/esb_link.hpp"

namespace wbansim {

struct Histogram {
  double origin_us = 0.0;  // left edge of bin 0
  double bin_width_us = 5.0;
  std::vector<std::uint64_t> counts;

  double center(std::size_t i) const { return origin_us + (static_cast<double>(i) + 0.5) * bin_width_us; }
  std::uint64_t total() const;
};

inline constexpr double kDefaultBinWidthUs = 5.0;

// Bins start at the multiple of the bin width at or below the minimum.
Histogram make_histogram(std::span<const double> values_us, double bin_width_us = kDefaultBinWidthUs);

struct Mode {
  double position_us = 0.0;  // centroid of the mode's neighbourhood
  double mass = 0.0;         // fraction of all counts nearest this mode
};

// Local maxima of the histogram at least spacing/2 apart. Peaks are ranked by
// the count within +-spacing/4; a peak holding less than min_mass_fraction of
// the total is ignored. Returned ascending by position, with each mode's mass
// taken from a nearest-mode partition of all bins.
std::vector<Mode> detect_modes(const Histogram& histogram, double expected_spacing_us,
                               double min_mass_fraction = 1e-3);

struct SummaryStats {
  std::size_t n = 0;     // samples included
  std::size_t lost = 0;  // records excluded because the interval never closed
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for n == 1
  double p99 = 0.0;
  double min = 0.0;
  double max = 0.0;
  Histogram histogram;
  std::vector<Mode> modes;
};

// Statistics are computed from the sorted samples, so they do not depend on
// input order. Throws EmptyInputError for no samples.
SummaryStats summarize_samples(std::span<const double> values_us, double bin_width_us = kDefaultBinWidthUs,
                               std::optional<double> mode_spacing_us = std::nullopt);

struct Interval {
  int from = 0;
  int to = 7;
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr Interval kEndToEnd{0, 7};
inline constexpr Interval kNetToNet{2, 5};
inline constexpr Interval kRadio{3, 4};

std::string to_token(Interval i);
// "d0d7", "d2d5", "d3d4" or any "dAdB" with A < B.
std::optional<Interval> parse_interval(std::string_view s);

// Over records whose interval closed; others are counted in `lost`. Throws
// EmptyInputError when none closed.
SummaryStats summarize(std::span<const TransmissionRecord> records, Interval interval,
                       double bin_width_us = kDefaultBinWidthUs,
                       std::optional<double> mode_spacing_us = std::nullopt);

// Linear interpolation between closest ranks of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace wbansim

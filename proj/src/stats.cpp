#include "wbansim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wbansim/errors.hpp"

namespace wbansim {

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

Histogram make_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("histogram bin width must be positive");
  Histogram h;
  h.bin_width_us = bin_width;
  if (values.empty()) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.origin_us = std::floor(*lo / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((*hi - h.origin_us) / bin_width)) + 1;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto i = static_cast<std::size_t>(std::floor((v - h.origin_us) / bin_width));
    h.counts[std::min(i, bins - 1)]++;
  }
  return h;
}

std::vector<Mode> detect_modes(const Histogram& h, double spacing, double min_mass_fraction) {
  const std::uint64_t total = h.total();
  if (total == 0) return {};
  if (!(spacing > 0.0)) throw DomainError("mode spacing must be positive");

  const std::size_t n = h.counts.size();
  const auto w = static_cast<std::size_t>(std::max(1.0, std::round(spacing / 4.0 / h.bin_width_us)));
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + h.counts[i];
  auto window = [&](std::size_t i) {
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n, i + w + 1);
    return std::pair{lo, hi};
  };
  std::vector<std::uint64_t> window_sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = window(i);
    window_sum[i] = prefix[hi] - prefix[lo];
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i)
    if (h.counts[i] > 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return window_sum[a] > window_sum[b]; });

  const double min_count = min_mass_fraction * static_cast<double>(total);
  std::vector<std::size_t> peaks;
  for (std::size_t i : order) {
    if (static_cast<double>(window_sum[i]) < min_count) break;
    const bool clear = std::all_of(peaks.begin(), peaks.end(), [&](std::size_t p) {
      return std::abs(h.center(i) - h.center(p)) >= spacing / 2.0;
    });
    if (clear) peaks.push_back(i);
  }

  std::vector<Mode> modes;
  for (std::size_t p : peaks) {
    const auto [lo, hi] = window(p);
    double weighted = 0.0;
    for (std::size_t i = lo; i < hi; ++i) weighted += h.center(i) * static_cast<double>(h.counts[i]);
    modes.push_back({weighted / static_cast<double>(prefix[hi] - prefix[lo]), 0.0});
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.position_us < b.position_us; });

  std::vector<std::uint64_t> mass(modes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (h.counts[i] == 0) continue;
    std::size_t best = 0;
    for (std::size_t m = 1; m < modes.size(); ++m)
      if (std::abs(h.center(i) - modes[m].position_us) < std::abs(h.center(i) - modes[best].position_us)) best = m;
    mass[best] += h.counts[i];
  }
  for (std::size_t m = 0; m < modes.size(); ++m)
    modes[m].mass = static_cast<double>(mass[m]) / static_cast<double>(total);
  return modes;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw EmptyInputError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

SummaryStats summarize_samples(std::span<const double> values, double bin_width, std::optional<double> mode_spacing) {
  if (values.empty()) throw EmptyInputError("no samples to summarize");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  SummaryStats s;
  s.n = sorted.size();
  const double n = static_cast<double>(s.n);
  // a constant sample gets exact moments rather than summation noise
  s.mean = sorted.front() == sorted.back() ? sorted.front() : std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median = quantile_sorted(sorted, 0.5);
  s.p99 = quantile_sorted(sorted, 0.99);
  s.min = sorted.front();
  s.max = sorted.back();
  s.histogram = make_histogram(sorted, bin_width);
  if (mode_spacing) s.modes = detect_modes(s.histogram, *mode_spacing);
  return s;
}

std::string to_token(Interval i) { return "d" + std::to_string(i.from) + "d" + std::to_string(i.to); }

std::optional<Interval> parse_interval(std::string_view s) {
  if (s.size() != 4 || s[0] != 'd' || s[2] != 'd') return std::nullopt;
  const int a = s[1] - '0';
  const int b = s[3] - '0';
  if (a < 0 || a >= kProbeCount || b < 0 || b >= kProbeCount || a >= b) return std::nullopt;
  return Interval{a, b};
}

SummaryStats summarize(std::span<const TransmissionRecord> records, Interval interval, double bin_width,
                       std::optional<double> mode_spacing) {
  std::vector<double> values;
  values.reserve(records.size());
  std::size_t lost = 0;
  for (const auto& r : records) {
    if (auto d = r.interval(interval.from, interval.to)) values.push_back(d->us());
    else ++lost;
  }
  if (values.empty()) throw EmptyInputError("no record closed interval " + to_token(interval));
  SummaryStats s = summarize_samples(values, bin_width, mode_spacing);
  s.lost = lost;
  return s;
}

}  // namespace wbansim

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wbansim/airtime.hpp"
#include "wbansim/config.hpp"
#include "wbansim/rng.hpp"
#include "wbansim/stats.hpp"

namespace wbansim {

struct BleLatencySample {
  double wait_us = 0.0;  // residual time to the next connection event
  double transfer_us = 0.0;
  double total_us = 0.0;
};

// Event arrival is uniform relative to the connection grid.
BleLatencySample sample_latency(const BleConfig& ble, RngStream& rng);

// n totals, sample i drawn from stream (seed, 0, i, Ble).
std::vector<double> sample_ble_totals(const BleConfig& ble, std::size_t n, std::uint64_t seed);

// Minimum interval with the transfer time of the ESB frame for `esb`.
BleConfig ble_equivalent(const EsbConfig& esb, const LayoutTable& layout = default_layout());

struct ComparisonReport {
  SummaryStats esb;
  SummaryStats ble;
  double mean_ratio = 0.0;  // BLE mean / ESB mean

  std::string render() const;
};

// Throws MismatchError when the sample counts differ or either is empty.
ComparisonReport compare(const SummaryStats& esb, const SummaryStats& ble);

}  // namespace wbansim

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wbansim/airtime.hpp"
#include "wbansim/config.hpp"
#include "wbansim/pipeline.hpp"

namespace wbansim {

// Retransmission penalty model: with probability p_r a packet pays one extra
// delay delta_r. n is the number of packets averaged over.
struct RetransStats {
  double p_r = 0.0;
  double delta_r_us = 435.0;
  std::uint64_t n = 1;
};

void validate(const RetransStats& s);

// p_r * delta_r
double expected_additional_delay(const RetransStats& s);
// p_r (1 - p_r) delta_r^2 / n, the variance of the mean penalty over n packets.
double additional_delay_variance(const RetransStats& s);
double additional_delay_sd(const RetransStats& s);

struct CopyDistribution {
  std::vector<double> first_copy;  // P(copy k is the first to arrive)
  double lost = 0.0;               // P(no copy arrives)
};

// P(k) = p^k (1 - p), P(lost) = p^copies.
CopyDistribution delivered_copy_distribution(double p_loss, int copies);

// Independent-loss inversion (never_received / sent)^(1/copies). Throws
// DomainError when sent == 0 or never_received > sent.
double estimate_loss_prob(std::uint64_t sent, std::uint64_t never_received, int copies);

// Mean and standard deviation of end-to-end latency offset for a delivered
// attempt: mixture of copy offsets k*delta conditioned on delivery, plus
// independent Gaussian jitter.
struct MixtureMoments {
  double mean_extra_us = 0.0;
  double sd_us = 0.0;
};
MixtureMoments delivered_delay_mixture(double p_loss, int copies, double delta_us, double jitter_sd_us = 0.0);

// Packet counts of one series:
//   sent = unique + lost attempts
//   received = unique + duplicates delivered
//   unique = valid + corrupted deliveries
struct Accounting {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t unique = 0;
  std::uint64_t valid = 0;

  std::uint64_t duplicates() const { return received - unique; }
  std::uint64_t corrupted() const { return unique - valid; }
  std::uint64_t lost() const { return sent - unique; }
  friend bool operator==(const Accounting&, const Accounting&) = default;
};

// (received - corrupted - duplicates) / sent. Throws DomainError when sent == 0
// or the counts are inconsistent.
double success_rate(const Accounting& a);

// Interval medians a pipeline is fitted to.
struct CalibrationTargets {
  double d0d7 = 0.0;
  double d2d5 = 0.0;
  double d3d4 = 0.0;
  friend bool operator==(const CalibrationTargets&, const CalibrationTargets&) = default;
};

// 486.30 / 293.07 / 185.86 us, measured with the lowest-latency preset.
CalibrationTargets olcfg_targets();

// Fits stage bases so that, without jitter or loss, `config` reproduces the
// three target intervals. Only sums of stage pairs are constrained; each pair
// is split evenly (TX and RX halves equal, the two IPC hops on each side
// equal). Jitter and modifiers are taken from `prior`; modifiers that apply to
// `config` are subtracted from the bases. Throws InfeasibleError when the
// frame's on-air time exceeds the D3-D4 target or a base would go negative,
// and DomainError when the targets are not strictly nested.
PipelineModel calibrate_pipeline(const CalibrationTargets& targets, const ValidatedConfig& config,
                                 const PipelineModel& prior, const LayoutTable& layout = default_layout());
PipelineModel calibrate_pipeline(const CalibrationTargets& targets, const ValidatedConfig& config);

struct MedianGroup {
  Parameter parameter;
  std::vector<std::pair<std::string, double>> medians;  // value label -> median us
};

// Per-parameter median D0-D7 latencies of the single-parameter sweeps,
// excluding TX power.
std::vector<MedianGroup> characterization_medians();
// TX power medians, for sensitivity studies only.
MedianGroup tx_power_medians();

// Each value's modifier is its median minus the group minimum, attached to
// default_stage(parameter).
ModifierTable modifier_table_from_medians(std::span<const MedianGroup> groups);

// characterization_medians() as a modifier table.
ModifierTable default_modifier_table();

// default_jitter(), default_modifier_table(), bases calibrated to
// olcfg_targets() for olcfg_preset().
const PipelineModel& default_pipeline();

}  // namespace wbansim

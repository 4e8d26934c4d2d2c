#include "wbansim/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "wbansim/errors.hpp"

namespace wbansim {
namespace {

// Strips binary noise from sums and differences of decimal inputs; far below
// the 0.1 us tick.
double tidy(double us) { return std::round(us * 1e6) / 1e6; }

}  // namespace

void validate(const RetransStats& s) {
  if (!(s.p_r >= 0.0 && s.p_r <= 1.0)) throw DomainError("p_r must be in [0, 1]");
  if (!(s.delta_r_us > 0.0)) throw DomainError("delta_r must be positive");
  if (s.n < 1) throw DomainError("n must be at least 1");
}

double expected_additional_delay(const RetransStats& s) {
  validate(s);
  return s.p_r * s.delta_r_us;
}

double additional_delay_variance(const RetransStats& s) {
  validate(s);
  return s.p_r * (1.0 - s.p_r) * s.delta_r_us * s.delta_r_us / static_cast<double>(s.n);
}

double additional_delay_sd(const RetransStats& s) { return std::sqrt(additional_delay_variance(s)); }

CopyDistribution delivered_copy_distribution(double p, int copies) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("loss probability must be in [0, 1]");
  if (copies < 1) throw DomainError("at least one copy");
  CopyDistribution d;
  double reach = 1.0;  // p^k
  for (int k = 0; k < copies; ++k) {
    d.first_copy.push_back(reach * (1.0 - p));
    reach *= p;
  }
  d.lost = reach;
  return d;
}

double estimate_loss_prob(std::uint64_t sent, std::uint64_t never_received, int copies) {
  if (sent == 0) throw DomainError("cannot estimate loss from zero transmissions");
  if (never_received > sent) throw DomainError("more losses than transmissions");
  if (copies < 1) throw DomainError("at least one copy");
  return std::pow(static_cast<double>(never_received) / static_cast<double>(sent), 1.0 / copies);
}

MixtureMoments delivered_delay_mixture(double p, int copies, double delta, double jitter_sd) {
  const CopyDistribution d = delivered_copy_distribution(p, copies);
  const double delivered = 1.0 - d.lost;
  if (!(delivered > 0.0)) throw DomainError("no copy is ever delivered");
  double m1 = 0.0;
  double m2 = 0.0;
  for (int k = 0; k < copies; ++k) {
    const double x = k * delta;
    m1 += d.first_copy[k] * x;
    m2 += d.first_copy[k] * x * x;
  }
  m1 /= delivered;
  m2 /= delivered;
  return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1) + jitter_sd * jitter_sd)};
}

double success_rate(const Accounting& a) {
  if (a.sent == 0) throw DomainError("success rate of zero transmissions");
  if (a.unique > a.sent || a.received < a.unique || a.valid > a.unique)
    throw DomainError("inconsistent accounting counts");
  return static_cast<double>(a.received - a.corrupted() - a.duplicates()) / static_cast<double>(a.sent);
}

CalibrationTargets olcfg_targets() { return {486.30, 293.07, 185.86}; }

PipelineModel calibrate_pipeline(const CalibrationTargets& t, const ValidatedConfig& config, const PipelineModel& prior,
                                 const LayoutTable& layout) {
  if (!(t.d0d7 > t.d2d5 && t.d2d5 > t.d3d4 && t.d3d4 > 0.0))
    throw DomainError("calibration targets must satisfy d0d7 > d2d5 > d3d4 > 0");
  const double air = on_air_time_us(config, layout);
  if (air > t.d3d4)
    throw InfeasibleError("on-air time " + std::to_string(air) + " us exceeds the D3-D4 target " +
                          std::to_string(t.d3d4) + " us");

  std::array<double, kStageCount> effective{};
  auto set = [&](Stage s, double v) { effective[static_cast<int>(s)] = v; };
  const double inner = (t.d2d5 - t.d3d4) / 2.0;
  const double outer = (t.d0d7 - t.d2d5) / 4.0;
  set(Stage::RadioOverhead, t.d3d4 - air);
  set(Stage::TxEsbStack, inner);
  set(Stage::RxEsbStack, inner);
  set(Stage::TxAppToIpc, outer);
  set(Stage::TxIpcToEsb, outer);
  set(Stage::RxToIpc, outer);
  set(Stage::RxIpcToApp, outer);

  PipelineModel out = prior;
  for (Stage s : kAllStages) {
    const double base = effective[static_cast<int>(s)] - prior.modifiers.offset_us(s, config);
    if (base < -1e-9)
      throw InfeasibleError("stage " + std::string(to_token(s)) + " would need a negative base (" +
                            std::to_string(base) + " us)");
    out.base(s) = tidy(base);
  }
  return out;
}

PipelineModel calibrate_pipeline(const CalibrationTargets& targets, const ValidatedConfig& config) {
  PipelineModel prior;
  prior.modifiers = default_modifier_table();
  return calibrate_pipeline(targets, config, prior);
}

std::vector<MedianGroup> characterization_medians() {
  return {
      {Parameter::Crc, {{"16", 562.39}, {"8", 558.39}, {"off", 554.30}}},
      {Parameter::Protocol, {{"dynamic", 562.39}, {"static", 563.10}}},
      {Parameter::Bitrate, {{"2M-ble", 559.32}, {"2M", 562.39}}},
      {Parameter::TxMode, {{"auto", 532.49}, {"manual", 534.23}, {"manual-start", 534.23}}},
      {Parameter::Payload, {{"standard", 625.16}, {"optimized", 617.89}}},
  };
}

MedianGroup tx_power_medians() {
  return {Parameter::Power, {{"10", 548.67}, {"5", 549.79}, {"0", 552.25}, {"-12", 548.87}, {"-30", 550.66}, {"-70", 550.00}}};
}

ModifierTable modifier_table_from_medians(std::span<const MedianGroup> groups) {
  ModifierTable table;
  for (const auto& g : groups) {
    if (g.medians.empty()) continue;
    double lowest = g.medians.front().second;
    for (const auto& [label, m] : g.medians) lowest = std::min(lowest, m);
    ParameterModifiers& mods = table.entries[g.parameter];
    mods.stage = default_stage(g.parameter);
    for (const auto& [label, m] : g.medians) mods.by_value[label] = tidy(m - lowest);
  }
  return table;
}

ModifierTable default_modifier_table() {
  const auto groups = characterization_medians();
  return modifier_table_from_medians(groups);
}

const PipelineModel& default_pipeline() {
  static const PipelineModel p = calibrate_pipeline(olcfg_targets(), validate(olcfg_preset()));
  return p;
}

}  // namespace wbansim

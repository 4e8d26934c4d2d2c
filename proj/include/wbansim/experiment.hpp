#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbansim/airtime.hpp"
#include "wbansim/analytics.hpp"
#include "wbansim/config.hpp"
#include "wbansim/esb_link.hpp"
#include "wbansim/pipeline.hpp"

namespace wbansim {

struct NamedConfig {
  std::string name;
  ValidatedConfig config;
  friend bool operator==(const NamedConfig&, const NamedConfig&) = default;
};

// Fully resolved experiment: every config validated against `layout`, the
// pipeline either read, calibrated from `targets`, or the default.
struct SweepPlan {
  std::uint64_t seed = 1;
  std::uint32_t rounds = 5;
  std::uint32_t attempts = 150;
  bool shuffle = true;
  std::vector<NamedConfig> configs;
  ChannelModel channel;
  LinkOptions link;
  PipelineModel pipeline;
  LayoutTable layout;
  std::optional<CalibrationTargets> targets;

  std::uint64_t attempts_per_config() const { return std::uint64_t{rounds} * attempts; }
  const NamedConfig* find(std::string_view name) const;
  friend bool operator==(const SweepPlan&, const SweepPlan&) = default;
};

// Sections (see README for every key):
//   [sweep]          seed rounds attempts shuffle
//   [config <name>]  crc protocol bitrate txmode power payload payload_len
//                    retransmits retransmit_delay_us  (omitted keys: OLCfg)
//   [channel]        p_loss p_corrupt p_loss_retx
//   [link]           dup_escape spacing_us copy_spacing fifo
//   [pipeline]       <stage>=<us> ... modifiers=default|none|listed
//   [jitter]         family <stage>=<sd us> ...
//   [modifier <parameter>]  stage <value>=<us> ...
//   [targets]        d0d7 d2d5 d3d4 config
//   [layout <bitrate>]
// Throws ParseError(line, reason) or UnknownKey(line, name); config
// validation errors propagate as RangeError / ScheduleError.
SweepPlan parse_experiment_file(std::string_view text);

// Canonical text; parse_experiment_file(render_experiment_file(p)) == p.
std::string render_experiment_file(const SweepPlan& plan, std::string_view header_comment = {});

// "section.key=value" with section one of sweep, channel, link, targets, or
// "config.<name>.key=value"; "config.*.key=value" applies to every config.
// Re-validates the plan.
void apply_override(SweepPlan& plan, std::string_view assignment);

// [pipeline], [jitter], [modifier ...] and [targets] sections describing a
// calibrated pipeline; what the calibrate command writes.
std::string render_pipeline_sections(const PipelineModel& pipeline, const std::optional<CalibrationTargets>& targets);

// Replaces the plan's pipeline description with the sections in
// `pipeline_text` (same grammar, pipeline-related sections only).
SweepPlan with_pipeline_text(const SweepPlan& plan, std::string_view pipeline_text);

// Plan with a single OLCfg config named "olcfg" and default everything.
SweepPlan default_plan();

}  // namespace wbansim

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "wbansim/config.hpp"

namespace wbansim {

// Delay stages between consecutive probe points. RadioOverhead is the part of
// D3->D4 left after subtracting copy offset and on-air time.
enum class Stage {
  TxAppToIpc,     // D0 -> D1
  TxIpcToEsb,     // D1 -> D2
  TxEsbStack,     // D2 -> D3
  RadioOverhead,  // D3 -> D4 minus offset and on-air time
  RxEsbStack,     // D4 -> D5
  RxToIpc,        // D5 -> D6
  RxIpcToApp,     // D6 -> D7
};
inline constexpr int kStageCount = 7;
inline constexpr std::array<Stage, kStageCount> kAllStages = {
    Stage::TxAppToIpc, Stage::TxIpcToEsb, Stage::TxEsbStack, Stage::RadioOverhead,
    Stage::RxEsbStack, Stage::RxToIpc,    Stage::RxIpcToApp};

std::string_view to_token(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

enum class JitterFamily { None, TruncatedNormal, Uniform };
std::string_view to_token(JitterFamily f);
std::optional<JitterFamily> parse_jitter_family(std::string_view s);

// Per-stage jitter. `sd_us` is the standard deviation for both families; the
// uniform family uses half-width sd * sqrt(3). Draws that would make a stage
// shorter than one tick are rejected and redrawn.
struct JitterModel {
  JitterFamily family = JitterFamily::TruncatedNormal;
  std::array<double, kStageCount> sd_us{};
  friend bool operator==(const JitterModel&, const JitterModel&) = default;
};

// Default total sigma across the seven stages is 25 us.
JitterModel default_jitter();

enum class Parameter { Crc, Protocol, Bitrate, TxMode, Power, Payload };
std::string_view to_token(Parameter p);
std::optional<Parameter> parse_parameter(std::string_view s);

// The value label a configuration takes for a parameter, e.g. "off" for CRC
// or "-12" for power.
std::string value_label(Parameter p, const EsbConfig& c);

// Stage that absorbs each parameter's latency effect.
Stage default_stage(Parameter p);

struct ParameterModifiers {
  Stage stage = Stage::TxEsbStack;
  std::map<std::string, double> by_value;  // additive us per value label
  friend bool operator==(const ParameterModifiers&, const ParameterModifiers&) = default;
};

struct ModifierTable {
  std::map<Parameter, ParameterModifiers> entries;

  // Sum of modifiers applying to `stage` under `config`. Values not listed add 0.
  double offset_us(Stage stage, const EsbConfig& config) const;
  friend bool operator==(const ModifierTable&, const ModifierTable&) = default;
};

struct PipelineModel {
  std::array<double, kStageCount> base_us{};
  JitterModel jitter = default_jitter();
  ModifierTable modifiers;

  double base(Stage s) const { return base_us[static_cast<int>(s)]; }
  double& base(Stage s) { return base_us[static_cast<int>(s)]; }
  // Base plus modifiers, before jitter.
  double effective_us(Stage s, const EsbConfig& config) const;
  friend bool operator==(const PipelineModel&, const PipelineModel&) = default;
};

// Throws RangeError for negative bases or jitter sigma.
void validate(const PipelineModel& pipeline);

}  // namespace wbansim

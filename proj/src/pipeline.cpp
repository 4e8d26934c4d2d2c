#include "wbansim/pipeline.hpp"

#include <cmath>

#include "wbansim/errors.hpp"

namespace wbansim {

std::string_view to_token(Stage s) {
  switch (s) {
    case Stage::TxAppToIpc: return "tx_app_to_ipc";
    case Stage::TxIpcToEsb: return "tx_ipc_to_esb";
    case Stage::TxEsbStack: return "tx_esb_stack";
    case Stage::RadioOverhead: return "radio_overhead";
    case Stage::RxEsbStack: return "rx_esb_stack";
    case Stage::RxToIpc: return "rx_to_ipc";
    case Stage::RxIpcToApp: return "rx_ipc_to_app";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : kAllStages)
    if (to_token(st) == s) return st;
  return std::nullopt;
}

std::string_view to_token(JitterFamily f) {
  switch (f) {
    case JitterFamily::None: return "none";
    case JitterFamily::TruncatedNormal: return "normal";
    case JitterFamily::Uniform: return "uniform";
  }
  return "?";
}

std::optional<JitterFamily> parse_jitter_family(std::string_view s) {
  if (s == "none") return JitterFamily::None;
  if (s == "normal") return JitterFamily::TruncatedNormal;
  if (s == "uniform") return JitterFamily::Uniform;
  return std::nullopt;
}

JitterModel default_jitter() {
  JitterModel j;
  j.family = JitterFamily::TruncatedNormal;
  // 25 us total spread evenly: sqrt(7) * 9.449 = 25.0
  j.sd_us.fill(25.0 / std::sqrt(static_cast<double>(kStageCount)));
  return j;
}

std::string_view to_token(Parameter p) {
  switch (p) {
    case Parameter::Crc: return "crc";
    case Parameter::Protocol: return "protocol";
    case Parameter::Bitrate: return "bitrate";
    case Parameter::TxMode: return "txmode";
    case Parameter::Power: return "power";
    case Parameter::Payload: return "payload";
  }
  return "?";
}

std::optional<Parameter> parse_parameter(std::string_view s) {
  for (Parameter p : {Parameter::Crc, Parameter::Protocol, Parameter::Bitrate, Parameter::TxMode, Parameter::Power,
                      Parameter::Payload})
    if (to_token(p) == s) return p;
  return std::nullopt;
}

std::string value_label(Parameter p, const EsbConfig& c) {
  switch (p) {
    case Parameter::Crc: return std::string(to_token(c.crc_mode));
    case Parameter::Protocol: return std::string(to_token(c.protocol_mode));
    case Parameter::Bitrate: return std::string(to_token(c.bitrate_mode));
    case Parameter::TxMode: return std::string(to_token(c.tx_mode));
    case Parameter::Power: return std::to_string(c.tx_power_dbm);
    case Parameter::Payload: return std::string(to_token(c.payload_mode));
  }
  return {};
}

Stage default_stage(Parameter p) {
  switch (p) {
    case Parameter::Crc: return Stage::RxEsbStack;      // checksum verification on receive
    case Parameter::Protocol: return Stage::TxEsbStack;
    case Parameter::Bitrate: return Stage::RadioOverhead;
    case Parameter::TxMode: return Stage::TxEsbStack;   // FIFO dequeue policy
    case Parameter::Power: return Stage::RadioOverhead;
    case Parameter::Payload: return Stage::TxIpcToEsb;  // payload transfer over IPC
  }
  return Stage::TxEsbStack;
}

double ModifierTable::offset_us(Stage stage, const EsbConfig& config) const {
  double total = 0.0;
  for (const auto& [param, mods] : entries) {
    if (mods.stage != stage) continue;
    if (auto it = mods.by_value.find(value_label(param, config)); it != mods.by_value.end()) total += it->second;
  }
  return total;
}

double PipelineModel::effective_us(Stage s, const EsbConfig& config) const {
  return base(s) + modifiers.offset_us(s, config);
}

void validate(const PipelineModel& p) {
  for (Stage s : kAllStages) {
    const double b = p.base(s);
    if (!std::isfinite(b) || b < 0.0) throw RangeError(std::string(to_token(s)), "stage base must be >= 0 us");
    const double sd = p.jitter.sd_us[static_cast<int>(s)];
    if (!std::isfinite(sd) || sd < 0.0) throw RangeError("jitter." + std::string(to_token(s)), "sigma must be >= 0");
  }
  for (const auto& [param, mods] : p.modifiers.entries)
    for (const auto& [label, v] : mods.by_value)
      if (!std::isfinite(v)) throw RangeError("modifier." + std::string(to_token(param)), "non-finite value");
}

}  // namespace wbansim

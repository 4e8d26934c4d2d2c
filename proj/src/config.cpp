#include "wbansim/config.hpp"

#include <cmath>
#include <string>

#include "wbansim/airtime.hpp"
#include "wbansim/errors.hpp"

namespace wbansim {

std::string_view to_token(CrcMode m) {
  switch (m) {
    case CrcMode::Crc16: return "16";
    case CrcMode::Crc8: return "8";
    case CrcMode::CrcOff: return "off";
  }
  return "?";
}

std::string_view to_token(ProtocolMode m) {
  return m == ProtocolMode::DynamicLength ? "dynamic" : "static";
}

std::string_view to_token(BitrateMode m) {
  switch (m) {
    case BitrateMode::Mbps2Ble: return "2M-ble";
    case BitrateMode::Mbps2: return "2M";
    case BitrateMode::Mbps1: return "1M";
  }
  return "?";
}

std::string_view to_token(TxMode m) {
  switch (m) {
    case TxMode::Automatic: return "auto";
    case TxMode::Manual: return "manual";
    case TxMode::ManualStart: return "manual-start";
  }
  return "?";
}

std::string_view to_token(PayloadMode m) { return m == PayloadMode::Standard ? "standard" : "optimized"; }

std::optional<CrcMode> parse_crc_mode(std::string_view s) {
  if (s == "16") return CrcMode::Crc16;
  if (s == "8") return CrcMode::Crc8;
  if (s == "off") return CrcMode::CrcOff;
  return std::nullopt;
}

std::optional<ProtocolMode> parse_protocol_mode(std::string_view s) {
  if (s == "dynamic") return ProtocolMode::DynamicLength;
  if (s == "static") return ProtocolMode::StaticLength;
  return std::nullopt;
}

std::optional<BitrateMode> parse_bitrate_mode(std::string_view s) {
  if (s == "2M-ble") return BitrateMode::Mbps2Ble;
  if (s == "2M") return BitrateMode::Mbps2;
  if (s == "1M") return BitrateMode::Mbps1;
  return std::nullopt;
}

std::optional<TxMode> parse_tx_mode(std::string_view s) {
  if (s == "auto") return TxMode::Automatic;
  if (s == "manual") return TxMode::Manual;
  if (s == "manual-start") return TxMode::ManualStart;
  return std::nullopt;
}

std::optional<PayloadMode> parse_payload_mode(std::string_view s) {
  if (s == "standard") return PayloadMode::Standard;
  if (s == "optimized") return PayloadMode::Optimized;
  return std::nullopt;
}

std::uint64_t config_hash(const EsbConfig& c) {
  const std::string canon = std::string(to_token(c.crc_mode)) + '|' + std::string(to_token(c.protocol_mode)) + '|' +
                            std::string(to_token(c.bitrate_mode)) + '|' + std::string(to_token(c.tx_mode)) + '|' +
                            std::to_string(c.tx_power_dbm) + '|' + std::string(to_token(c.payload_mode)) + '|' +
                            std::to_string(c.payload_len_bytes) + '|' + std::to_string(c.retransmit_count) + '|' +
                            std::to_string(std::llround(c.retransmit_delay_us * 10.0));
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

EsbConfig olcfg_preset() {
  EsbConfig c;
  c.crc_mode = CrcMode::CrcOff;
  c.protocol_mode = ProtocolMode::DynamicLength;
  c.bitrate_mode = BitrateMode::Mbps2Ble;
  c.tx_mode = TxMode::Manual;
  c.tx_power_dbm = 0;
  c.payload_mode = PayloadMode::Optimized;
  c.payload_len_bytes = 1;
  c.retransmit_count = 2;
  c.retransmit_delay_us = 435.0;
  return c;
}

EsbConfig baseline_preset() { return EsbConfig{}; }

ValidatedConfig validate(const EsbConfig& c, const LayoutTable& layout) {
  if (c.tx_power_dbm < kMinTxPowerDbm || c.tx_power_dbm > kMaxTxPowerDbm)
    throw RangeError("tx_power_dbm", std::to_string(c.tx_power_dbm) + " not in [-70, 10]");
  if (c.payload_len_bytes < kMinPayloadBytes || c.payload_len_bytes > kMaxPayloadBytes)
    throw RangeError("payload_len_bytes", std::to_string(c.payload_len_bytes) + " not in [1, 252]");
  if (c.retransmit_count < 0 || c.retransmit_count > kMaxRetransmits)
    throw RangeError("retransmit_count", std::to_string(c.retransmit_count) + " not in [0, 15]");
  if (!std::isfinite(c.retransmit_delay_us) || c.retransmit_delay_us < 0.0)
    throw RangeError("retransmit_delay_us", "must be a non-negative duration");
  // Only meaningful when there is more than one copy, but the delay is part of
  // the configuration either way.
  const Ticks air = on_air_ticks(c, layout);
  if (Ticks::from_us(c.retransmit_delay_us) < air)
    throw ScheduleError("retransmit_delay_us " + format_ticks(Ticks::from_us(c.retransmit_delay_us)) +
                        " us is shorter than the frame on-air time " + format_ticks(air) + " us");
  return ValidatedConfig(c);
}

ValidatedConfig validate(const EsbConfig& config) { return validate(config, default_layout()); }

void validate(const ChannelModel& ch) {
  auto prob = [](double p, const char* field) {
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError(field, "probability not in [0, 1]");
  };
  prob(ch.p_loss, "p_loss");
  prob(ch.p_corrupt, "p_corrupt");
  if (ch.p_loss_retransmit) prob(*ch.p_loss_retransmit, "p_loss_retx");
  if (!ch.independent_copies) throw RangeError("independent_copies", "only independent copy loss is modeled");
}

void validate(const BleConfig& ble) {
  if (!(ble.connection_interval_us >= kMinConnectionIntervalUs))
    throw RangeError("connection_interval_us", "below the 7500 us minimum");
  if (!(ble.transfer_time_us >= 0.0)) throw RangeError("transfer_time_us", "negative");
}

}  // namespace wbansim

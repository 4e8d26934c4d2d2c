#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wbansim {

enum class CrcMode { Crc16, Crc8, CrcOff };
enum class ProtocolMode { DynamicLength, StaticLength };
enum class BitrateMode { Mbps2Ble, Mbps2, Mbps1 };
enum class TxMode { Automatic, Manual, ManualStart };
enum class PayloadMode { Standard, Optimized };

inline constexpr int kMinTxPowerDbm = -70;
inline constexpr int kMaxTxPowerDbm = 10;
inline constexpr int kMinPayloadBytes = 1;
// Upper bound from the ESB product documentation.
inline constexpr int kMaxPayloadBytes = 252;
inline constexpr int kMaxRetransmits = 15;
inline constexpr double kMinConnectionIntervalUs = 7500.0;

// Bits per microsecond on air.
constexpr int bits_per_us(BitrateMode m) { return m == BitrateMode::Mbps1 ? 1 : 2; }
constexpr int crc_bits(CrcMode m) {
  switch (m) {
    case CrcMode::Crc16: return 16;
    case CrcMode::Crc8: return 8;
    case CrcMode::CrcOff: return 0;
  }
  return 0;
}
constexpr bool crc_enabled(CrcMode m) { return m != CrcMode::CrcOff; }

// Tokens used by the experiment file format.
std::string_view to_token(CrcMode m);
std::string_view to_token(ProtocolMode m);
std::string_view to_token(BitrateMode m);
std::string_view to_token(TxMode m);
std::string_view to_token(PayloadMode m);
std::optional<CrcMode> parse_crc_mode(std::string_view s);
std::optional<ProtocolMode> parse_protocol_mode(std::string_view s);
std::optional<BitrateMode> parse_bitrate_mode(std::string_view s);
std::optional<TxMode> parse_tx_mode(std::string_view s);
std::optional<PayloadMode> parse_payload_mode(std::string_view s);

// One point in the ESB parameter space.
struct EsbConfig {
  CrcMode crc_mode = CrcMode::Crc16;
  ProtocolMode protocol_mode = ProtocolMode::DynamicLength;
  BitrateMode bitrate_mode = BitrateMode::Mbps2;
  TxMode tx_mode = TxMode::Automatic;
  int tx_power_dbm = 0;
  PayloadMode payload_mode = PayloadMode::Standard;
  int payload_len_bytes = 8;
  int retransmit_count = 2;  // total copies = retransmit_count + 1
  double retransmit_delay_us = 435.0;

  int copies() const { return retransmit_count + 1; }
  friend bool operator==(const EsbConfig&, const EsbConfig&) = default;
};

// FNV-1a over the canonical field tokens; stable across runs and platforms.
std::uint64_t config_hash(const EsbConfig& c);

// The lowest-latency configuration: CRC off, dynamic length, 2 Mbit/s BLE
// mode, manual TX, 0 dBm, payload pre-built on the network core, one byte,
// two retransmissions 435 us apart.
EsbConfig olcfg_preset();

// The characterization baseline all single-parameter sweeps vary from.
EsbConfig baseline_preset();

struct LayoutTable;

class ValidatedConfig {
 public:
  const EsbConfig& get() const { return config_; }
  const EsbConfig* operator->() const { return &config_; }
  operator const EsbConfig&() const { return config_; }
  friend bool operator==(const ValidatedConfig&, const ValidatedConfig&) = default;

 private:
  explicit ValidatedConfig(EsbConfig c) : config_(c) {}
  friend ValidatedConfig validate(const EsbConfig&, const LayoutTable&);
  EsbConfig config_;
};

// Throws RangeError naming the field, or ScheduleError when the retransmit
// delay is shorter than one frame on air.
ValidatedConfig validate(const EsbConfig& config, const LayoutTable& layout);
ValidatedConfig validate(const EsbConfig& config);

// Per-copy channel behaviour. Copies are lost independently; a copy that
// survives is corrupted independently with p_corrupt.
struct ChannelModel {
  double p_loss = 0.043;
  double p_corrupt = 15.0 / 735.0;
  // Loss probability for copies after the first. Unset means p_loss.
  std::optional<double> p_loss_retransmit;
  bool independent_copies = true;

  double loss_for_copy(int k) const { return k == 0 ? p_loss : p_loss_retransmit.value_or(p_loss); }
  friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

void validate(const ChannelModel& channel);

struct BleConfig {
  double connection_interval_us = kMinConnectionIntervalUs;
  double transfer_time_us = 0.0;
  friend bool operator==(const BleConfig&, const BleConfig&) = default;
};

void validate(const BleConfig& ble);

}  // namespace wbansim

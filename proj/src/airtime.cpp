#include "wbansim/airtime.hpp"

#include <sstream>

#include "wbansim/errors.hpp"
#include "wbansim/kvtext.hpp"

namespace wbansim {

const LayoutTable& default_layout() {
  static const LayoutTable table = [] {
    LayoutTable t;
    t[BitrateMode::Mbps2Ble] = {16, 40, 9, 0};
    t[BitrateMode::Mbps2] = {16, 40, 9, 0};
    t[BitrateMode::Mbps1] = {8, 40, 9, 0};
    return t;
  }();
  return table;
}

LayoutTable parse_layout_text(std::string_view text) {
  LayoutTable table = default_layout();
  for (const auto& sec : parse_kv_text(text)) {
    if (sec.kind != "layout") throw ParseError(sec.line, "unexpected section '" + sec.kind + "'");
    const auto mode = parse_bitrate_mode(sec.name);
    if (!mode) throw ParseError(sec.line, "unknown bitrate mode '" + sec.name + "'");
    BitrateLayout& l = table[*mode];
    for (const auto& e : sec.entries) {
      const long long v = kv_int(e);
      if (v < 0 || v > 4096) throw ParseError(e.line, "'" + e.key + "' out of range");
      if (e.key == "preamble_bits") l.preamble_bits = static_cast<int>(v);
      else if (e.key == "address_bits") l.address_bits = static_cast<int>(v);
      else if (e.key == "pcf_dynamic_bits") l.pcf_dynamic_bits = static_cast<int>(v);
      else if (e.key == "pcf_static_bits") l.pcf_static_bits = static_cast<int>(v);
      else throw UnknownKey(e.line, e.key);
    }
  }
  return table;
}

std::string render_layout_text(const LayoutTable& layout) {
  std::ostringstream os;
  for (BitrateMode m : {BitrateMode::Mbps2Ble, BitrateMode::Mbps2, BitrateMode::Mbps1}) {
    const auto& l = layout[m];
    os << "[layout " << to_token(m) << "]\n"
       << "preamble_bits=" << l.preamble_bits << " address_bits=" << l.address_bits
       << " pcf_dynamic_bits=" << l.pcf_dynamic_bits << " pcf_static_bits=" << l.pcf_static_bits << "\n";
  }
  return os.str();
}

FrameLayout frame_layout(const EsbConfig& config, const LayoutTable& layout) {
  const BitrateLayout& l = layout[config.bitrate_mode];
  return FrameLayout{
      .preamble_bits = l.preamble_bits,
      .address_bits = l.address_bits,
      .pcf_bits = config.protocol_mode == ProtocolMode::DynamicLength ? l.pcf_dynamic_bits : l.pcf_static_bits,
      .crc_bits = crc_bits(config.crc_mode),
  };
}

long long frame_bits(const EsbConfig& config, const LayoutTable& layout) {
  return frame_layout(config, layout).header_bits() + 8LL * config.payload_len_bytes;
}

Ticks on_air_ticks(const EsbConfig& config, const LayoutTable& layout) {
  // bits / (bits per us) us = bits * 10 / rate ticks; rate is 1 or 2.
  return Ticks(frame_bits(config, layout) * Ticks::kPerMicrosecond / bits_per_us(config.bitrate_mode));
}

double on_air_time_us(const EsbConfig& config, const LayoutTable& layout) {
  return static_cast<double>(frame_bits(config, layout)) / bits_per_us(config.bitrate_mode);
}

}  // namespace wbansim

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "wbansim/config.hpp"
#include "wbansim/units.hpp"

namespace wbansim {

// Header constants of an ESB frame for one bitrate mode.
struct BitrateLayout {
  int preamble_bits = 0;
  int address_bits = 0;
  int pcf_dynamic_bits = 0;
  int pcf_static_bits = 0;
  friend bool operator==(const BitrateLayout&, const BitrateLayout&) = default;
};

// Resolved bit counts of one frame.
struct FrameLayout {
  int preamble_bits = 0;
  int address_bits = 0;
  int pcf_bits = 0;
  int crc_bits = 0;

  int header_bits() const { return preamble_bits + address_bits + pcf_bits + crc_bits; }
};

struct LayoutTable {
  std::array<BitrateLayout, 3> by_bitrate{};  // indexed by BitrateMode

  const BitrateLayout& operator[](BitrateMode m) const { return by_bitrate[static_cast<int>(m)]; }
  BitrateLayout& operator[](BitrateMode m) { return by_bitrate[static_cast<int>(m)]; }
  friend bool operator==(const LayoutTable&, const LayoutTable&) = default;
};

// Preamble 8 bits at 1 Mbit/s and 16 bits at 2 Mbit/s, 5-byte address,
// 9-bit packet control field in dynamic mode and none in static mode.
const LayoutTable& default_layout();

// Sections `[layout 2M-ble]`, `[layout 2M]`, `[layout 1M]` with keys
// preamble_bits, address_bits, pcf_dynamic_bits, pcf_static_bits. Modes not
// listed keep their default constants.
LayoutTable parse_layout_text(std::string_view text);
std::string render_layout_text(const LayoutTable& layout);

FrameLayout frame_layout(const EsbConfig& config, const LayoutTable& layout = default_layout());

// Total bits on air; payload_len_bytes is not range-checked so a zero-byte
// frame yields the header-only count.
long long frame_bits(const EsbConfig& config, const LayoutTable& layout = default_layout());

// frame_bits / bitrate. Exact: every supported rate divides into tenths.
Ticks on_air_ticks(const EsbConfig& config, const LayoutTable& layout = default_layout());
double on_air_time_us(const EsbConfig& config, const LayoutTable& layout = default_layout());

}  // namespace wbansim

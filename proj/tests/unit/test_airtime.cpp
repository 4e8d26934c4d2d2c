#include <doctest.h>

#include <vector>

#include "wbansim/airtime.hpp"
#include "wbansim/errors.hpp"

using namespace wbansim;

namespace {

// Independent bit count from the documented constants.
long long oracle_bits(const EsbConfig& c) {
  const long long preamble = c.bitrate_mode == BitrateMode::Mbps1 ? 8 : 16;
  const long long pcf = c.protocol_mode == ProtocolMode::DynamicLength ? 9 : 0;
  const long long crc = c.crc_mode == CrcMode::Crc16 ? 16 : c.crc_mode == CrcMode::Crc8 ? 8 : 0;
  return preamble + 40 + pcf + 8LL * c.payload_len_bytes + crc;
}

std::vector<EsbConfig> all_configs(int payload) {
  std::vector<EsbConfig> out;
  for (auto crc : {CrcMode::Crc16, CrcMode::Crc8, CrcMode::CrcOff})
    for (auto proto : {ProtocolMode::DynamicLength, ProtocolMode::StaticLength})
      for (auto rate : {BitrateMode::Mbps2Ble, BitrateMode::Mbps2, BitrateMode::Mbps1}) {
        EsbConfig c;
        c.crc_mode = crc;
        c.protocol_mode = proto;
        c.bitrate_mode = rate;
        c.payload_len_bytes = payload;
        out.push_back(c);
      }
  return out;
}

}  // namespace

TEST_CASE("frame bits for the optimal configuration") {
  EsbConfig c = olcfg_preset();
  CHECK(frame_bits(c) == 73);
  CHECK(on_air_time_us(c) == 36.5);
  CHECK(on_air_ticks(c) == Ticks(365));
  c.crc_mode = CrcMode::Crc16;
  CHECK(frame_bits(c) == 89);
}

TEST_CASE("8-byte Crc16 frame at 1 Mbit/s") {
  EsbConfig c;
  c.payload_len_bytes = 8;
  c.crc_mode = CrcMode::Crc16;
  c.bitrate_mode = BitrateMode::Mbps1;
  c.protocol_mode = ProtocolMode::DynamicLength;
  CHECK(frame_bits(c) == 137);
  CHECK(on_air_time_us(c) == 137.0);
}

TEST_CASE("zero-byte payload gives the header-only count") {
  EsbConfig c = olcfg_preset();
  c.payload_len_bytes = 0;
  CHECK(frame_bits(c) == 16 + 40 + 9);
  CHECK(frame_layout(c).header_bits() == 65);
}

TEST_CASE("bit counts agree with the independent oracle for every mode") {
  for (int payload : {1, 8, 32, 252})
    for (const auto& c : all_configs(payload)) {
      CHECK(frame_bits(c) == oracle_bits(c));
      // on-air time times bitrate recovers the bit count exactly
      CHECK(on_air_time_us(c) * bits_per_us(c.bitrate_mode) == static_cast<double>(frame_bits(c)));
      CHECK(on_air_ticks(c).count() * bits_per_us(c.bitrate_mode) == frame_bits(c) * 10);
    }
}

TEST_CASE("on-air time is monotone in payload and CRC width") {
  for (const auto& c : all_configs(1)) {
    EsbConfig a = c;
    EsbConfig b = c;
    for (int len = 1; len < 252; ++len) {
      a.payload_len_bytes = len;
      b.payload_len_bytes = len + 1;
      CHECK(on_air_time_us(a) < on_air_time_us(b));
    }
    EsbConfig off = c, c8 = c, c16 = c;
    off.crc_mode = CrcMode::CrcOff;
    c8.crc_mode = CrcMode::Crc8;
    c16.crc_mode = CrcMode::Crc16;
    CHECK(on_air_time_us(off) < on_air_time_us(c8));
    CHECK(on_air_time_us(c8) < on_air_time_us(c16));
  }
}

TEST_CASE("doubling the bitrate halves a fixed frame") {
  LayoutTable same = default_layout();
  same[BitrateMode::Mbps1] = same[BitrateMode::Mbps2];
  for (const auto& base : all_configs(8)) {
    EsbConfig slow = base, fast = base;
    slow.bitrate_mode = BitrateMode::Mbps1;
    fast.bitrate_mode = BitrateMode::Mbps2;
    REQUIRE(frame_bits(slow, same) == frame_bits(fast, same));
    CHECK(on_air_time_us(slow, same) == 2.0 * on_air_time_us(fast, same));
  }
}

TEST_CASE("layout constants file") {
  const LayoutTable t = parse_layout_text("[layout 2M]\npcf_static_bits=3\n# comment\n[layout 1M] preamble_bits=16\n");
  CHECK(t[BitrateMode::Mbps2].pcf_static_bits == 3);
  CHECK(t[BitrateMode::Mbps1].preamble_bits == 16);
  CHECK(t[BitrateMode::Mbps2Ble] == default_layout()[BitrateMode::Mbps2Ble]);
  EsbConfig c;
  c.protocol_mode = ProtocolMode::StaticLength;
  c.bitrate_mode = BitrateMode::Mbps2;
  CHECK(frame_bits(c, t) == frame_bits(c) + 3);

  CHECK(parse_layout_text(render_layout_text(t)) == t);
  CHECK_THROWS_AS(parse_layout_text("[layout 2M]\nsync_bits=3\n"), UnknownKey);
  CHECK_THROWS_AS(parse_layout_text("[layout 3M]\npreamble_bits=3\n"), ParseError);
  CHECK_THROWS_AS(parse_layout_text("[layout 2M]\npreamble_bits=-1\n"), ParseError);
}

#include <doctest.h>

#include <cmath>
#include <set>

#include "../support.hpp"
#include "wbansim/errors.hpp"
#include "wbansim/esb_link.hpp"

using namespace wbansim;
using wbansim::testing::clean_channel;
using wbansim::testing::quiet_pipeline;

namespace {

struct Rig {
  ValidatedConfig config = validate(olcfg_preset());
  ChannelModel channel = clean_channel();
  PipelineModel pipeline = quiet_pipeline();
  LinkOptions options;
  LayoutTable layout = default_layout();
  AttemptSetup setup() const { return {config, channel, pipeline, options, layout}; }
};

double iv(const TransmissionRecord& r, int a, int b) { return r.interval(a, b)->us(); }

}  // namespace

TEST_CASE("copy schedule") {
  EsbConfig c = olcfg_preset();
  CHECK(schedule_copies(c, Ticks(0)) == std::vector<Ticks>{Ticks(0), Ticks(4350), Ticks(8700)});
  c.retransmit_count = 0;
  CHECK(schedule_copies(c, Ticks(17)) == std::vector<Ticks>{Ticks(17)});
  c.retransmit_count = 2;
  // end-to-start adds one frame (36.5 us) per gap
  CHECK(schedule_copies(c, Ticks(0), CopySpacing::EndToStart) ==
        std::vector<Ticks>{Ticks(0), Ticks(4715), Ticks(9430)});
  for (int n = 0; n <= kMaxRetransmits; ++n) {
    c.retransmit_count = n;
    const auto s = schedule_copies(c, Ticks(0));
    CHECK(s.size() == static_cast<std::size_t>(n + 1));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] - s[i - 1] == Ticks(4350));
  }
}

TEST_CASE("dedup verdicts") {
  RngStream rng(1, {0, 0, Purpose::Dedup});
  SUBCASE("first valid copy kept, rest suppressed under CRC") {
    const std::vector<CopyArrival> in{{0, false}, {1, false}, {2, false}};
    const auto r = dedup(in, CrcMode::Crc16, 1.0, rng);
    CHECK(r.kept == 0);
    CHECK(r.suppressed == 2);
    CHECK(r.escaped == 0);
  }
  SUBCASE("corrupted copy 0 discarded by CRC, copy 1 kept") {
    const std::vector<CopyArrival> in{{0, true}, {1, false}};
    const auto r = dedup(in, CrcMode::Crc8, 0.0, rng);
    CHECK(r.kept == 1);
    CHECK_FALSE(r.kept_corrupted);
    CHECK(r.crc_discarded == 1);
  }
  SUBCASE("without CRC a corrupted copy is delivered") {
    const std::vector<CopyArrival> in{{0, true}, {1, false}};
    const auto r = dedup(in, CrcMode::CrcOff, 0.0, rng);
    CHECK(r.kept == 0);
    CHECK(r.kept_corrupted);
    CHECK(r.suppressed == 1);
  }
  SUBCASE("escape probability one lets every later copy through") {
    const std::vector<CopyArrival> in{{0, false}, {1, false}, {2, false}};
    const auto r = dedup(in, CrcMode::CrcOff, 1.0, rng);
    CHECK(r.kept == 0);
    CHECK(r.escaped == 2);
  }
  SUBCASE("nothing arrives") {
    const auto r = dedup(std::span<const CopyArrival>{}, CrcMode::CrcOff, 0.5, rng);
    CHECK_FALSE(r.kept.has_value());
  }
}

TEST_CASE("tx fifo") {
  TxFifo f(2);
  CHECK(f.push({.pid = 1}));
  CHECK(f.push({.pid = 2}));
  CHECK_FALSE(f.push({.pid = 3}));
  CHECK(f.pop()->pid == 1);
  CHECK(f.pop()->pid == 2);
  CHECK_FALSE(f.pop().has_value());
}

TEST_CASE("noise-free attempt reproduces the calibrated intervals") {
  Rig rig;
  const auto r = transmit(rig.setup(), {1, 0, 0});
  REQUIRE(r.outcome == Outcome::Delivered);
  CHECK(r.delivered_copy == 0);
  CHECK(record_consistent(r));
  CHECK(std::abs(iv(r, 0, 7) - 486.3) < 0.11);
  CHECK(std::abs(iv(r, 2, 5) - 293.07) < 0.11);
  CHECK(std::abs(iv(r, 3, 4) - 185.86) < 0.11);
  CHECK(r.duplicates_suppressed == 2);
}

TEST_CASE("all copies lost") {
  Rig rig;
  rig.channel.p_loss = 1.0;
  const auto r = transmit(rig.setup(), {1, 0, 0});
  CHECK(r.outcome == Outcome::Lost);
  CHECK_FALSE(r.delivered_copy.has_value());
  CHECK(r.probes[3].has_value());
  for (int i = 4; i < kProbeCount; ++i) CHECK_FALSE(r.probes[i].has_value());
  CHECK(record_consistent(r));
  CHECK_FALSE(r.interval(0, 7).has_value());
}

TEST_CASE("first copy lost: the second arrives exactly one retransmit delay later") {
  Rig rig;
  const auto base = transmit(rig.setup(), {3, 0, 0});
  rig.channel.p_loss = 1.0;
  rig.channel.p_loss_retransmit = 0.0;
  const auto r = transmit(rig.setup(), {3, 0, 0});
  REQUIRE(r.delivered_copy == 1);
  CHECK(std::abs((*r.probes[4] - *base.probes[4]).us() - 435.0) <= 0.1);
  CHECK(std::abs(iv(r, 0, 7) - iv(base, 0, 7) - 435.0) <= 0.1);
  CHECK(r.duplicates_suppressed == 1);
}

TEST_CASE("radio interval support is the copy offsets when jitter is off") {
  Rig rig;
  rig.channel.p_loss = 0.4;
  rig.channel.p_corrupt = 0.1;
  const auto recs = run_attempt_series(rig.setup(), 2000, {.seed = 11, .round = 0});
  const double c = iv(transmit(validate(olcfg_preset()), clean_channel(), quiet_pipeline(), {0, 0, 0}), 3, 4);
  std::set<int> seen;
  for (const auto& r : recs) {
    CHECK(record_consistent(r));
    if (!r.delivered()) continue;
    const double d = iv(r, 3, 4) - c;
    const int k = static_cast<int>(std::lround(d / 435.0));
    CHECK(std::abs(d - 435.0 * k) <= 0.1);
    CHECK(k == *r.delivered_copy);
    seen.insert(k);
  }
  CHECK(seen == std::set<int>{0, 1, 2});
}

TEST_CASE("probes are strictly increasing under heavy jitter") {
  Rig rig;
  rig.pipeline = default_pipeline();
  rig.pipeline.jitter.sd_us.fill(60.0);
  rig.channel = ChannelModel{};
  for (auto fam : {JitterFamily::TruncatedNormal, JitterFamily::Uniform}) {
    rig.pipeline.jitter.family = fam;
    for (const auto& r : run_attempt_series(rig.setup(), 500, {.seed = 5})) CHECK(record_consistent(r));
  }
}

TEST_CASE("CRC-enabled series never delivers duplicates or corrupted payloads") {
  EsbConfig c = olcfg_preset();
  c.crc_mode = CrcMode::Crc16;
  Rig rig;
  rig.config = validate(c);
  rig.channel.p_loss = 0.2;
  rig.channel.p_corrupt = 0.3;
  rig.options.dup_escape_prob = 1.0;
  int discarded_first = 0;
  for (const auto& r : run_attempt_series(rig.setup(), 1000, {.seed = 8})) {
    CHECK(r.duplicates_delivered == 0);
    CHECK(r.outcome != Outcome::DeliveredCorrupted);
    if (r.delivered_copy && *r.delivered_copy > 0) ++discarded_first;
  }
  CHECK(discarded_first > 0);
}

TEST_CASE("CRC off with certain escape delivers every surviving later copy") {
  Rig rig;
  rig.options.dup_escape_prob = 1.0;
  const auto r = transmit(rig.setup(), {1, 0, 0});
  CHECK(r.duplicates_delivered == 2);
  CHECK(r.duplicates_suppressed == 0);
}

TEST_CASE("loss count at p = 0.266 over 750 attempts") {
  Rig rig;
  rig.channel.p_loss = 0.266;
  const auto recs = run_attempt_series(rig.setup(), 750, {.seed = 1});
  REQUIRE(recs.size() == 750);
  std::size_t lost = 0;
  for (const auto& r : recs) lost += !r.delivered();
  const double q = std::pow(0.266, 3);
  const double sigma = std::sqrt(750 * q * (1 - q));
  CHECK(std::abs(static_cast<double>(lost) - 750 * q) <= 3 * sigma);
}

TEST_CASE("zero loss delivers everything") {
  Rig rig;
  rig.pipeline = default_pipeline();
  const auto recs = run_attempt_series(rig.setup(), 150, {.seed = 4});
  REQUIRE(recs.size() == 150);
  for (const auto& r : recs) CHECK(r.outcome == Outcome::Delivered);
}

TEST_CASE("series bookkeeping and determinism") {
  Rig rig;
  rig.pipeline = default_pipeline();
  rig.channel = ChannelModel{};
  const SeriesKey key{.seed = 99, .round = 2, .first_stream_index = 10, .config_name = "x"};
  const auto a = run_attempt_series(rig.setup(), 50, key);
  const auto b = run_attempt_series(rig.setup(), 50, key);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].attempt == i);
    CHECK(a[i].round == 2);
    CHECK(a[i].config_name == "x");
    CHECK(*a[i].probes[0] == Ticks(60000 * static_cast<std::int64_t>(10 + i)));
  }
  const auto c = run_attempt_series(rig.setup(), 50, {.seed = 100, .round = 2, .first_stream_index = 10});
  CHECK(a[0].probes != c[0].probes);

  std::vector<Event> t1, t2;
  transmit(rig.setup(), {99, 2, 10}, Ticks(0), &t1);
  transmit(rig.setup(), {99, 2, 10}, Ticks(0), &t2);
  CHECK(t1 == t2);
  CHECK_FALSE(t1.empty());
}

TEST_CASE("series rejects an empty count or a spacing that cannot hold an attempt") {
  Rig rig;
  CHECK_THROWS_AS(run_attempt_series(rig.setup(), 0, {}), RangeError);
  rig.options.attempt_spacing_us = 1000.0;
  CHECK(nominal_attempt_span_us(rig.setup()) > 1000.0);
  CHECK_THROWS_AS(run_attempt_series(rig.setup(), 1, {}), ScheduleError);
}

TEST_CASE("payload mode changes the IPC stage by its modifier") {
  Rig rig;
  const double fast = iv(transmit(rig.setup(), {1, 0, 0}), 0, 7);
  EsbConfig c = olcfg_preset();
  c.payload_mode = PayloadMode::Standard;
  rig.config = validate(c);
  const double slow = iv(transmit(rig.setup(), {1, 0, 0}), 0, 7);
  CHECK(std::abs(slow - fast - 7.27) <= 0.1);
}

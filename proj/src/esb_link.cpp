#include "wbansim/esb_link.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "wbansim/errors.hpp"
#include "wbansim/kvtext.hpp"

namespace wbansim {

std::string_view to_token(Outcome o) {
  switch (o) {
    case Outcome::Delivered: return "delivered";
    case Outcome::DeliveredCorrupted: return "corrupted";
    case Outcome::Lost: return "lost";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  if (s == "delivered") return Outcome::Delivered;
  if (s == "corrupted") return Outcome::DeliveredCorrupted;
  if (s == "lost") return Outcome::Lost;
  return std::nullopt;
}

std::optional<Ticks> TransmissionRecord::interval(int from, int to) const {
  const auto& a = probes.at(static_cast<std::size_t>(from));
  const auto& b = probes.at(static_cast<std::size_t>(to));
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

bool record_consistent(const TransmissionRecord& r) {
  std::optional<Ticks> prev;
  for (const auto& p : r.probes) {
    if (!p) continue;
    if (prev && !(*prev < *p)) return false;
    prev = p;
  }
  for (int i = 0; i < 4; ++i)
    if (!r.probes[i]) return false;
  const bool rx_absent = std::none_of(r.probes.begin() + 4, r.probes.end(), [](const auto& p) { return p.has_value(); });
  const bool rx_full = std::all_of(r.probes.begin() + 4, r.probes.end(), [](const auto& p) { return p.has_value(); });
  const bool lost = r.outcome == Outcome::Lost;
  if (lost != !r.delivered_copy.has_value()) return false;
  if (lost ? !rx_absent : !rx_full) return false;
  return r.duplicates_suppressed >= 0 && r.duplicates_delivered >= 0;
}

bool TxFifo::push(const Payload& p) {
  if (items_.size() >= capacity_) return false;
  items_.push_back(p);
  return true;
}

std::optional<Payload> TxFifo::pop() {
  if (items_.empty()) return std::nullopt;
  Payload p = items_.front();
  items_.pop_front();
  return p;
}

namespace {

Ticks copy_offset(const EsbConfig& config, int k, CopySpacing spacing, Ticks air) {
  Ticks step = Ticks::from_us(config.retransmit_delay_us);
  if (spacing == CopySpacing::EndToStart) step += air;
  return step * k;
}

double copy_offset_us(const EsbConfig& config, int k, CopySpacing spacing, double air_us) {
  return copy_offset(config, k, spacing, Ticks::from_us(air_us)).us();
}

}  // namespace

std::vector<Ticks> schedule_copies(const EsbConfig& config, Ticks t_d3, CopySpacing spacing,
                                   const LayoutTable& layout) {
  const Ticks air = on_air_ticks(config, layout);
  std::vector<Ticks> starts;
  starts.reserve(static_cast<std::size_t>(config.copies()));
  for (int k = 0; k < config.copies(); ++k) starts.push_back(t_d3 + copy_offset(config, k, spacing, air));
  return starts;
}

Verdict Deduplicator::accept(const CopyArrival& copy) {
  if (crc_enabled(crc_) && copy.corrupted) return Verdict::DiscardCrc;
  if (!delivered_) {
    delivered_ = true;
    return copy.corrupted ? Verdict::DeliverCorrupted : Verdict::Deliver;
  }
  if (crc_enabled(crc_)) return Verdict::Suppress;
  return rng_->bernoulli(escape_prob_) ? Verdict::EscapedDuplicate : Verdict::Suppress;
}

DedupResult dedup(std::span<const CopyArrival> copies, CrcMode crc, double escape_prob, RngStream& rng) {
  Deduplicator d(crc, escape_prob, rng);
  DedupResult r;
  for (const auto& c : copies) {
    switch (d.accept(c)) {
      case Verdict::Deliver:
      case Verdict::DeliverCorrupted:
        r.kept = c.index;
        r.kept_corrupted = c.corrupted;
        break;
      case Verdict::Suppress: ++r.suppressed; break;
      case Verdict::EscapedDuplicate: ++r.escaped; break;
      case Verdict::DiscardCrc: ++r.crc_discarded; break;
    }
  }
  return r;
}

namespace {

constexpr NodeId kTxNode = 0;
constexpr NodeId kRxNode = 1;
constexpr double kMinStageUs = 0.1;

double draw_stage(double mean, double sd, JitterFamily family, RngStream& rng) {
  if (family == JitterFamily::None || sd == 0.0) return std::max(mean, kMinStageUs);
  const double half_width = sd * std::sqrt(3.0);
  for (int tries = 0; tries < 64; ++tries) {
    const double j = family == JitterFamily::TruncatedNormal ? sd * rng.normal() : rng.uniform(-half_width, half_width);
    if (mean + j >= kMinStageUs) return mean + j;
  }
  return kMinStageUs;
}

// Everything random about one attempt, drawn before the engine runs so each
// purpose consumes its own stream in a fixed order.
struct AttemptDraws {
  std::array<double, kStageCount> stage_us{};
  std::vector<double> overhead_us;  // radio overhead per copy
  std::vector<bool> lost;
  std::vector<bool> corrupted;
};

AttemptDraws draw_attempt(const AttemptSetup& s, const AttemptKey& key) {
  const EsbConfig& c = s.config.get();
  RngStream jitter(key.seed, {key.round, key.stream_index, Purpose::Jitter});
  RngStream loss(key.seed, {key.round, key.stream_index, Purpose::Loss});
  RngStream corrupt(key.seed, {key.round, key.stream_index, Purpose::Corrupt});
  const auto& jm = s.pipeline.jitter;

  AttemptDraws d;
  for (Stage st : kAllStages) {
    if (st == Stage::RadioOverhead) continue;
    const int i = static_cast<int>(st);
    d.stage_us[i] = draw_stage(s.pipeline.effective_us(st, c), jm.sd_us[i], jm.family, jitter);
  }
  const int ro = static_cast<int>(Stage::RadioOverhead);
  const double ro_mean = s.pipeline.effective_us(Stage::RadioOverhead, c);
  for (int k = 0; k < c.copies(); ++k) {
    d.overhead_us.push_back(draw_stage(ro_mean, jm.sd_us[ro], jm.family, jitter));
    d.lost.push_back(loss.bernoulli(s.channel.loss_for_copy(k)));
    d.corrupted.push_back(corrupt.bernoulli(s.channel.p_corrupt));
  }
  return d;
}

// Shared state of the TX and RX node state machines for one attempt. Stage
// durations accumulate in continuous microseconds and each probe is the
// nearest tick, never earlier than one tick after the previous probe.
struct Attempt {
  const AttemptSetup& setup;
  AttemptDraws draws;
  Ticks start;
  TransmissionRecord record;
  TxFifo fifo;
  double tx_offset_us = 0.0;
  double rx_offset_us = 0.0;
  std::vector<double> arrival_offset_us;
  RngStream dedup_rng;
  Deduplicator dedup;

  Attempt(const AttemptSetup& s, const AttemptKey& key, Ticks t0)
      : setup(s),
        draws(draw_attempt(s, key)),
        start(t0),
        fifo(s.options.fifo_capacity),
        dedup_rng(key.seed, {key.round, key.stream_index, Purpose::Dedup}),
        dedup(s.config->crc_mode, s.options.dup_escape_prob, dedup_rng) {}

  Ticks at(double offset_us, int after_probe) const {
    Ticks t = start + Ticks::from_us(offset_us);
    if (after_probe >= 0) {
      const auto& prev = record.probes[after_probe];
      if (prev && t <= *prev) t = *prev + Ticks(1);
    }
    return t;
  }

  double stage(Stage s) const { return draws.stage_us[static_cast<int>(s)]; }

  void on_tx(Engine& eng, const Event& ev) {
    const EsbConfig& c = setup.config.get();
    switch (ev.kind) {
      case EventKind::TxCommand:
        record.probes[0] = eng.now();
        tx_offset_us += stage(Stage::TxAppToIpc);
        eng.schedule({.time = at(tx_offset_us, 0), .kind = EventKind::IpcToNet, .node = kTxNode});
        break;
      case EventKind::IpcToNet:
        record.probes[1] = eng.now();
        tx_offset_us += stage(Stage::TxIpcToEsb);
        eng.schedule({.time = at(tx_offset_us, 1), .kind = EventKind::EsbSend, .node = kTxNode});
        break;
      case EventKind::EsbSend:
        record.probes[2] = eng.now();
        if (c.payload_mode == PayloadMode::Standard)
          fifo.push(Payload{.pid = 0, .length = c.payload_len_bytes, .preconstructed = false});
        tx_offset_us += stage(Stage::TxEsbStack);
        eng.schedule({.time = at(tx_offset_us, 2), .kind = EventKind::RadioStart, .node = kTxNode});
        break;
      case EventKind::RadioStart: {
        record.probes[3] = eng.now();
        if (!fifo.pop()) return;  // nothing queued: nothing goes on air
        const double air = on_air_time_us(c, setup.layout);
        arrival_offset_us.assign(static_cast<std::size_t>(c.copies()), 0.0);
        for (int k = 0; k < c.copies(); ++k) {
          const double arrival =
              tx_offset_us + copy_offset_us(c, k, setup.options.copy_spacing, air) + air + draws.overhead_us[k];
          arrival_offset_us[k] = arrival;
          if (draws.lost[k]) continue;
          eng.schedule({.time = at(arrival, 3), .kind = EventKind::CopyArrival, .node = kRxNode, .arg = k});
        }
        break;
      }
      default: break;
    }
  }

  void on_rx(Engine& eng, const Event& ev) {
    switch (ev.kind) {
      case EventKind::CopyArrival: {
        const int k = ev.arg;
        const Verdict v = dedup.accept({k, draws.corrupted[k]});
        if (v == Verdict::Deliver || v == Verdict::DeliverCorrupted) {
          record.probes[4] = eng.now();
          record.delivered_copy = k;
          record.outcome = v == Verdict::Deliver ? Outcome::Delivered : Outcome::DeliveredCorrupted;
          rx_offset_us = arrival_offset_us[k] + stage(Stage::RxEsbStack);
          eng.schedule({.time = at(rx_offset_us, 4), .kind = EventKind::RxHandler, .node = kRxNode});
        } else if (v == Verdict::Suppress) {
          ++record.duplicates_suppressed;
        } else if (v == Verdict::EscapedDuplicate) {
          ++record.duplicates_delivered;
        }
        break;
      }
      case EventKind::RxHandler:
        record.probes[5] = eng.now();
        rx_offset_us += stage(Stage::RxToIpc);
        eng.schedule({.time = at(rx_offset_us, 5), .kind = EventKind::RxIpcStart, .node = kRxNode});
        break;
      case EventKind::RxIpcStart:
        record.probes[6] = eng.now();
        rx_offset_us += stage(Stage::RxIpcToApp);
        eng.schedule({.time = at(rx_offset_us, 6), .kind = EventKind::AppNotify, .node = kRxNode});
        break;
      case EventKind::AppNotify:
        record.probes[7] = eng.now();
        break;
      default: break;
    }
  }
};

}  // namespace

TransmissionRecord transmit(const AttemptSetup& setup, const AttemptKey& key, Ticks start, std::vector<Event>* trace) {
  Attempt a(setup, key, start);
  if (setup.config->payload_mode == PayloadMode::Optimized)
    a.fifo.push(Payload{.pid = 0, .length = setup.config->payload_len_bytes, .preconstructed = true});

  Engine eng;
  eng.record_trace(trace);
  eng.attach(kTxNode, [&a](Engine& e, const Event& ev) { a.on_tx(e, ev); });
  eng.attach(kRxNode, [&a](Engine& e, const Event& ev) { a.on_rx(e, ev); });
  eng.schedule({.time = start, .kind = EventKind::TxCommand, .node = kTxNode});
  eng.run_until_idle();

  a.record.seed = key.seed;
  a.record.round = key.round;
  return a.record;
}

TransmissionRecord transmit(const ValidatedConfig& config, const ChannelModel& channel, const PipelineModel& pipeline,
                            const AttemptKey& key) {
  static const LinkOptions options;
  return transmit(AttemptSetup{config, channel, pipeline, options, default_layout()}, key);
}

double nominal_attempt_span_us(const AttemptSetup& s) {
  const EsbConfig& c = s.config.get();
  double span = 0.0;
  for (Stage st : kAllStages) span += std::max(s.pipeline.effective_us(st, c), kMinStageUs);
  const double air = on_air_time_us(c, s.layout);
  return span + air + copy_offset_us(c, c.retransmit_count, s.options.copy_spacing, air);
}

std::vector<TransmissionRecord> run_attempt_series(const AttemptSetup& setup, std::size_t n, const SeriesKey& key) {
  if (n == 0) throw RangeError("attempts", "at least one attempt per series");
  if (nominal_attempt_span_us(setup) >= setup.options.attempt_spacing_us)
    throw ScheduleError("attempt spacing " + format_double(setup.options.attempt_spacing_us) +
                        " us cannot hold one attempt");
  const Ticks spacing = Ticks::from_us(setup.options.attempt_spacing_us);
  std::vector<TransmissionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t index = key.first_stream_index + i;
    TransmissionRecord r = transmit(setup, {key.seed, key.round, index}, spacing * static_cast<std::int64_t>(index));
    r.config_name = key.config_name;
    r.attempt = static_cast<std::uint32_t>(i);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace wbansim

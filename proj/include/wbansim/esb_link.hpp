#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wbansim/airtime.hpp"
#include "wbansim/config.hpp"
#include "wbansim/engine.hpp"
#include "wbansim/pipeline.hpp"
#include "wbansim/rng.hpp"
#include "wbansim/units.hpp"

namespace wbansim {

inline constexpr int kProbeCount = 8;

enum class Outcome { Delivered, DeliveredCorrupted, Lost };
std::string_view to_token(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);

struct TransmissionRecord {
  std::string config_name;
  std::uint64_t seed = 0;
  std::uint32_t round = 0;
  std::uint32_t attempt = 0;
  std::array<std::optional<Ticks>, kProbeCount> probes{};  // d0..d7
  std::optional<int> delivered_copy;
  Outcome outcome = Outcome::Lost;
  int duplicates_suppressed = 0;
  int duplicates_delivered = 0;

  bool delivered() const { return outcome != Outcome::Lost; }
  // probes[to] - probes[from] when both were reached.
  std::optional<Ticks> interval(int from, int to) const;
  friend bool operator==(const TransmissionRecord&, const TransmissionRecord&) = default;
};

// Probe ordering and Lost <=> no delivered copy <=> d4..d7 absent.
bool record_consistent(const TransmissionRecord& r);

// Reference point of the retransmit delay between consecutive copies.
enum class CopySpacing { StartToStart, EndToStart };

struct LinkOptions {
  // Chance that a later copy slips past duplicate suppression when CRC is off.
  double dup_escape_prob = 1.0 / 735.0;
  double attempt_spacing_us = 6000.0;
  CopySpacing copy_spacing = CopySpacing::StartToStart;
  std::size_t fifo_capacity = 3;
  friend bool operator==(const LinkOptions&, const LinkOptions&) = default;
};

struct Payload {
  std::uint8_t pid = 0;
  int length = 0;
  bool preconstructed = false;
};

// TX FIFO of the network core. Optimized payload mode keeps one payload
// pre-loaded; standard mode writes it after the IPC transfer.
class TxFifo {
 public:
  explicit TxFifo(std::size_t capacity) : capacity_(capacity) {}
  bool push(const Payload& p);
  std::optional<Payload> pop();
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::deque<Payload> items_;
};

// Start times of all copies. Copies go out unconditionally since the link runs
// without acknowledgements.
std::vector<Ticks> schedule_copies(const EsbConfig& config, Ticks t_d3,
                                   CopySpacing spacing = CopySpacing::StartToStart,
                                   const LayoutTable& layout = default_layout());

struct CopyArrival {
  int index = 0;
  bool corrupted = false;
};

enum class Verdict { Deliver, DeliverCorrupted, Suppress, EscapedDuplicate, DiscardCrc };

// Receiver-side filter for one attempt's copies, fed in arrival order.
class Deduplicator {
 public:
  Deduplicator(CrcMode crc, double escape_prob, RngStream& rng)
      : crc_(crc), escape_prob_(escape_prob), rng_(&rng) {}
  Verdict accept(const CopyArrival& copy);

 private:
  CrcMode crc_;
  double escape_prob_;
  RngStream* rng_;
  bool delivered_ = false;
};

struct DedupResult {
  std::optional<int> kept;
  bool kept_corrupted = false;
  int suppressed = 0;
  int escaped = 0;
  int crc_discarded = 0;
};

DedupResult dedup(std::span<const CopyArrival> copies, CrcMode crc, double escape_prob, RngStream& rng);

// Identifies the random streams of one attempt.
struct AttemptKey {
  std::uint64_t seed = 0;
  std::uint32_t round = 0;
  std::uint64_t stream_index = 0;
};

struct AttemptSetup {
  const ValidatedConfig& config;
  const ChannelModel& channel;
  const PipelineModel& pipeline;
  const LinkOptions& options;
  const LayoutTable& layout;
};

// One broadcast attempt starting at `start`, run on its own engine.
TransmissionRecord transmit(const AttemptSetup& setup, const AttemptKey& key, Ticks start = Ticks{},
                            std::vector<Event>* trace = nullptr);

TransmissionRecord transmit(const ValidatedConfig& config, const ChannelModel& channel,
                            const PipelineModel& pipeline, const AttemptKey& key);

struct SeriesKey {
  std::uint64_t seed = 0;
  std::uint32_t round = 0;
  std::uint64_t first_stream_index = 0;
  std::string config_name;
};

// n attempts spaced options.attempt_spacing_us apart. Attempt i uses stream
// index first_stream_index + i and starts at that index times the spacing.
// Throws ScheduleError if the spacing cannot hold the deterministic part of
// one attempt.
std::vector<TransmissionRecord> run_attempt_series(const AttemptSetup& setup, std::size_t n, const SeriesKey& key);

// Worst-case deterministic span of one attempt from D0 to D7, excluding jitter.
double nominal_attempt_span_us(const AttemptSetup& setup);

}  // namespace wbansim

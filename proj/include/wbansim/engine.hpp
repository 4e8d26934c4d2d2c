#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "wbansim/units.hpp"

namespace wbansim {

enum class EventKind : std::uint8_t {
  TxCommand,       // D0
  IpcToNet,        // D1
  EsbSend,         // D2
  RadioStart,      // D3
  CopyArrival,     // candidate D4
  RxHandler,       // D5
  RxIpcStart,      // D6
  AppNotify,       // D7
  Custom,
};

using NodeId = std::uint32_t;

struct Event {
  Ticks time;
  std::uint64_t seq = 0;  // assigned by the engine
  EventKind kind = EventKind::Custom;
  NodeId node = 0;
  std::int32_t arg = 0;  // copy index for CopyArrival

  friend bool operator==(const Event&, const Event&) = default;
};

// Single-threaded discrete-event core. Events run in (time, seq) order, so
// events at equal timestamps run in insertion order.
class Engine {
 public:
  using Handler = std::function<void(Engine&, const Event&)>;

  Ticks now() const { return clock_; }

  // Throws TimeTravelError if event.time < now().
  void schedule(Event event);
  void schedule_after(Ticks delay, EventKind kind, NodeId node, std::int32_t arg = 0);

  // Routes events for `node` to `handler`; unrouted events are dropped.
  void attach(NodeId node, Handler handler);

  // Drains the queue. Returns the timestamp of the last processed event, or
  // zero when nothing ran.
  Ticks run_until_idle();

  bool idle() const { return queue_.empty(); }
  std::size_t processed() const { return processed_; }

  // When set, every processed event is appended.
  void record_trace(std::vector<Event>* trace) { trace_ = trace; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<Handler> handlers_;
  Ticks clock_{};
  Ticks last_{};
  std::uint64_t next_seq_ = 0;
  std::size_t processed_ = 0;
  std::vector<Event>* trace_ = nullptr;
};

}  // namespace wbansim

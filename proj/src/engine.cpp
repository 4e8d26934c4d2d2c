#include "wbansim/engine.hpp"

#include "wbansim/errors.hpp"

namespace wbansim {

void Engine::schedule(Event event) {
  if (event.time < clock_)
    throw TimeTravelError("event at " + format_ticks(event.time) + " us scheduled before clock " +
                          format_ticks(clock_) + " us");
  event.seq = next_seq_++;
  queue_.push(event);
}

void Engine::schedule_after(Ticks delay, EventKind kind, NodeId node, std::int32_t arg) {
  schedule(Event{.time = clock_ + delay, .seq = 0, .kind = kind, .node = node, .arg = arg});
}

void Engine::attach(NodeId node, Handler handler) {
  if (handlers_.size() <= node) handlers_.resize(node + 1);
  handlers_[node] = std::move(handler);
}

Ticks Engine::run_until_idle() {
  while (!queue_.empty()) {
    const Event ev = queue_.top();
    queue_.pop();
    clock_ = ev.time;
    last_ = ev.time;
    ++processed_;
    if (trace_) trace_->push_back(ev);
    if (ev.node < handlers_.size() && handlers_[ev.node]) handlers_[ev.node](*this, ev);
  }
  return last_;
}

}  // namespace wbansim

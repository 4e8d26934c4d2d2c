#include <doctest.h>

#include <cmath>
#include <set>

#include "wbansim/engine.hpp"
#include "wbansim/errors.hpp"
#include "wbansim/rng.hpp"

using namespace wbansim;

TEST_CASE("empty queue runs to zero") {
  Engine e;
  CHECK(e.run_until_idle() == Ticks(0));
  CHECK(e.processed() == 0);
}

TEST_CASE("events run in time order, ties in insertion order") {
  Engine e;
  std::vector<int> order;
  e.attach(0, [&](Engine&, const Event& ev) { order.push_back(ev.arg); });
  e.schedule({.time = Ticks(50), .kind = EventKind::Custom, .node = 0, .arg = 3});
  e.schedule({.time = Ticks(10), .kind = EventKind::Custom, .node = 0, .arg = 1});
  e.schedule({.time = Ticks(10), .kind = EventKind::Custom, .node = 0, .arg = 2});
  e.schedule({.time = Ticks(50), .kind = EventKind::Custom, .node = 0, .arg = 4});
  CHECK(e.run_until_idle() == Ticks(50));
  CHECK(order == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("scheduling at the current clock runs next in its class; the past is rejected") {
  Engine e;
  std::vector<int> order;
  e.attach(0, [&](Engine& eng, const Event& ev) {
    order.push_back(ev.arg);
    if (ev.arg == 1) {
      eng.schedule({.time = eng.now(), .kind = EventKind::Custom, .node = 0, .arg = 9});
      CHECK_THROWS_AS(eng.schedule({.time = eng.now() - Ticks(1), .kind = EventKind::Custom, .node = 0}),
                      TimeTravelError);
    }
  });
  e.schedule({.time = Ticks(5), .kind = EventKind::Custom, .node = 0, .arg = 1});
  e.schedule({.time = Ticks(5), .kind = EventKind::Custom, .node = 0, .arg = 2});
  e.schedule({.time = Ticks(6), .kind = EventKind::Custom, .node = 0, .arg = 3});
  e.run_until_idle();
  CHECK(order == std::vector<int>{1, 2, 9, 3});
}

TEST_CASE("sequence numbers strictly increase and the trace records processing order") {
  Engine e;
  std::vector<Event> trace;
  e.record_trace(&trace);
  e.attach(1, [](Engine& eng, const Event& ev) {
    if (ev.arg < 5) eng.schedule_after(Ticks(3), EventKind::Custom, 1, ev.arg + 1);
  });
  e.schedule({.time = Ticks(0), .kind = EventKind::Custom, .node = 1, .arg = 0});
  CHECK(e.run_until_idle() == Ticks(15));
  REQUIRE(trace.size() == 6);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i].seq > trace[i - 1].seq);
}

TEST_CASE("ticks format and parse") {
  CHECK(format_ticks(Ticks(4863)) == "486.3");
  CHECK(format_ticks(Ticks(5)) == "0.5");
  CHECK(format_ticks(Ticks(-12)) == "-1.2");
  Ticks t;
  CHECK(parse_ticks("486.3", t));
  CHECK(t == Ticks(4863));
  CHECK(parse_ticks("12", t));
  CHECK(t == Ticks(120));
  CHECK_FALSE(parse_ticks("1.25", t));
  CHECK_FALSE(parse_ticks("abc", t));
  CHECK(Ticks::from_us(36.5) == Ticks(365));
  CHECK(Ticks::from_us(185.86) == Ticks(1859));
}

TEST_CASE("bernoulli extremes") {
  RngStream r(7, {0, 0, Purpose::Loss});
  for (int i = 0; i < 10000; ++i) {
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
  }
}

TEST_CASE("bernoulli mean at p = 0.266 over 1e5 draws") {
  RngStream r(2025, {1, 2, Purpose::Loss});
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.266);
  CHECK(std::abs(static_cast<double>(hits) / n - 0.266) <= 0.01);
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, {3, 4, Purpose::Jitter});
  RngStream b(42, {3, 4, Purpose::Jitter});
  RngStream c(42, {3, 4, Purpose::Loss});
  RngStream d(42, {3, 5, Purpose::Jitter});
  RngStream e(43, {3, 4, Purpose::Jitter});
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  for (auto* s : {&a, &c, &d, &e}) firsts.insert(s->next_u64());
  CHECK(firsts.size() == 4);
}

TEST_CASE("uniform, integer and normal draws") {
  RngStream r(9, {0, 0, Purpose::Jitter});
  double sum = 0, sum2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform(2.0, 5.0);
    CHECK(u >= 2.0);
    CHECK(u < 5.0);
    const auto k = r.below(7);
    CHECK(k < 7);
    const double z = r.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(n) * 1.5);
  CHECK(std::abs(sum2 / n - mean * mean - 1.0) < 0.02);
}

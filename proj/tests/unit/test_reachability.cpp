#include <random>

#include "doctest.h"
#include "support.hpp"
#include "virtint/tapn.hpp"

using namespace virtint;

namespace {

// p0 -[lo,hi]-> t0 -> p1, one token of age 0 in p0.
struct Chain {
  Tapn net;
  Marking m0;
  TargetSpec done;
};

Chain chain(Guard g) {
  Chain c;
  const auto p0 = c.net.add_place("p0");
  const auto p1 = c.net.add_place("p1");
  const auto t = c.net.add_transition("t0", "go");
  c.net.add_input_arc(p0, t, g);
  c.net.add_output_arc(t, p1);
  c.m0 = Marking(2);
  c.m0.add(p0, 0);
  c.done = TargetSpec{{{p1, 1}}};
  return c;
}

}  // namespace

TEST_CASE("exact guard needs a delay and the trace replays") {
  const Chain c = chain(Guard::exactly(5));
  const ReachResult r = reachable(c.net, c.m0, c.done);
  REQUIRE(r.verdict == ReachVerdict::Reachable);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].delay == 5);
  const auto end = replay(c.net, c.m0, r.trace);
  REQUIRE(end.has_value());
  CHECK(c.done.matches(*end));
}

TEST_CASE("initial marking already on target gives an empty trace") {
  const Chain c = chain(Guard::any());
  const ReachResult r = reachable(c.net, c.m0, TargetSpec{{{PlaceId{0}, 1}}});
  CHECK(r.verdict == ReachVerdict::Reachable);
  CHECK(r.trace.empty());
}

TEST_CASE("conflicting guards on two inputs make the target unreachable") {
  Tapn n;
  const auto a = n.add_place("a");
  const auto b = n.add_place("b");
  const auto c = n.add_place("c");
  const auto t = n.add_transition("t");
  n.add_input_arc(a, t, Guard::closed(0, 1));
  n.add_input_arc(b, t, Guard::at_least(4));
  n.add_output_arc(t, c);
  Marking m(3);
  m.add(a, 0);
  m.add(b, 0);
  const ReachResult r = reachable(n, m, TargetSpec{{{c, 1}}});
  CHECK(r.verdict == ReachVerdict::Unreachable);
  CHECK(r.stats.dead_markings >= 1);
  CHECK_FALSE(r.frontier.empty());
  CHECK(untimed_reachable(n, m, TargetSpec{{{c, 1}}}).verdict == ReachVerdict::Reachable);
}

TEST_CASE("state and delay bounds") {
  const Chain c = chain(Guard::exactly(5));
  SUBCASE("state bound hit") {
    ReachOptions o;
    o.max_states = 1;
    CHECK(reachable(c.net, c.m0, c.done, o).verdict == ReachVerdict::BoundExceeded);
  }
  SUBCASE("delay bound below the needed delay") {
    ReachOptions o;
    o.max_total_delay = 4;
    CHECK(reachable(c.net, c.m0, c.done, o).verdict == ReachVerdict::BoundExceeded);
    o.max_total_delay = 5;
    CHECK(reachable(c.net, c.m0, c.done, o).verdict == ReachVerdict::Reachable);
  }
  SUBCASE("zero bounds are rejected") {
    ReachOptions o;
    o.max_states = 0;
    CHECK_THROWS_AS(reachable(c.net, c.m0, c.done, o), std::invalid_argument);
    o = ReachOptions{};
    o.max_total_delay = 0;
    CHECK_THROWS_AS(reachable(c.net, c.m0, c.done, o), std::invalid_argument);
  }
}

TEST_CASE("right-open finite guards are refused") {
  const Chain c = chain(Guard::right_open(1, 3));
  CHECK_THROWS_AS(reachable(c.net, c.m0, c.done), UnsupportedGuard);
  CHECK(untimed_reachable(c.net, c.m0, c.done).verdict == ReachVerdict::Reachable);
}

TEST_CASE("transport arcs carry age into later guards") {
  Tapn n;
  const auto a = n.add_place("a");
  const auto b = n.add_place("b");
  const auto c = n.add_place("c");
  const auto t1 = n.add_transition("t1");
  const auto t2 = n.add_transition("t2");
  n.add_transport_arc(a, t1, b, Guard::at_least(3));
  n.add_input_arc(b, t2, Guard::closed(0, 2));
  n.add_output_arc(t2, c);
  Marking m(3);
  m.add(a, 0);
  CHECK(reachable(n, m, TargetSpec{{{c, 1}}}).verdict == ReachVerdict::Unreachable);
}

TEST_CASE("search is deterministic") {
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto rn = testing::random_net(rng, 5, 3);
    const auto a = reachable(rn.net, rn.m0, rn.target);
    const auto b = reachable(rn.net, rn.m0, rn.target);
    CHECK(a.verdict == b.verdict);
    CHECK(a.trace == b.trace);
    CHECK(a.stats.states == b.stats.states);
  }
}

TEST_CASE("engine agrees with the exact-age search on small nets") {
  std::mt19937 rng(11);
  for (int i = 0; i < 40; ++i) {
    const auto rn = testing::random_net(rng, 4, 3);
    const auto r = reachable(rn.net, rn.m0, rn.target);
    REQUIRE(r.verdict != ReachVerdict::BoundExceeded);
    const std::size_t steps = 2 * rn.net.transition_count() * (rn.net.max_constant() + 2);
    CHECK((r.verdict == ReachVerdict::Reachable) == testing::naive_reachable(rn.net, rn.m0, rn.target, steps));
    if (r.verdict == ReachVerdict::Reachable) {
      const auto end = replay(rn.net, rn.m0, r.trace);
      REQUIRE(end.has_value());
      CHECK(rn.target.matches(*end));
    }
  }
}

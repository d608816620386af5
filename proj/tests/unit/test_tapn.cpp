#include "doctest.h"
#include "virtint/tapn.hpp"

using namespace virtint;

TEST_CASE("guard intervals") {
  CHECK(Guard::any().contains(0));
  CHECK(Guard::any().contains(1000));
  CHECK_FALSE(Guard::at_least(3).contains(2));
  CHECK(Guard::closed(2, 4).contains(4));
  CHECK_FALSE(Guard::right_open(2, 4).contains(4));
  CHECK(Guard::exactly(5).contains(5));
  CHECK_FALSE(Guard::exactly(5).contains(6));
  CHECK_THROWS_AS(Guard::closed(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(Guard::right_open(2, 2), std::invalid_argument);

  CHECK(to_string(Guard::any()) == "[0,inf)");
  CHECK(to_string(Guard::any(), "\xE2\x88\x9E") == "[0,\xE2\x88\x9E)");
  CHECK(to_string(Guard::exactly(5)) == "[5,5]");
  CHECK(to_string(Guard::right_open(2, 4)) == "[2,4)");
}

TEST_CASE("flow relation rejects duplicate connections") {
  Tapn n;
  const auto p = n.add_place("p");
  const auto q = n.add_place("q");
  const auto t = n.add_transition("t");
  n.add_input_arc(p, t, Guard::any());
  CHECK_THROWS_AS(n.add_input_arc(p, t, Guard::any()), std::invalid_argument);
  CHECK_THROWS_AS(n.add_transport_arc(p, t, q, Guard::any()), std::invalid_argument);
  n.add_output_arc(t, q);
  CHECK_THROWS_AS(n.add_output_arc(t, q), std::invalid_argument);
  CHECK_THROWS_AS(n.add_input_arc(PlaceId{9}, t, Guard::any()), std::invalid_argument);
}

TEST_CASE("marking keeps ages sorted and saturates on delay") {
  Marking m(2);
  m.add(PlaceId{0}, 3);
  m.add(PlaceId{0}, 1);
  CHECK(m.tokens(PlaceId{0}) == std::vector<Age>{1, 3});
  CHECK(m.total() == 2);
  CHECK_FALSE(m.remove(PlaceId{0}, 2));
  CHECK(m.remove(PlaceId{0}, 3));
  m.shift(UINT64_MAX);
  CHECK(m.tokens(PlaceId{0}) == std::vector<Age>{UINT32_MAX});
  m.cap_ages(7);
  CHECK(m.tokens(PlaceId{0}) == std::vector<Age>{7});
}

TEST_CASE("normal arcs reset age, transport arcs keep it") {
  Tapn n;
  const auto a = n.add_place("a");
  const auto b = n.add_place("b");
  const auto c = n.add_place("c");
  const auto d = n.add_place("d");
  const auto t = n.add_transition("t", "x");
  n.add_input_arc(a, t, Guard::closed(1, 2));
  n.add_transport_arc(b, t, c, Guard::at_least(2));
  n.add_output_arc(t, d);

  Marking m(4);
  m.add(a, 0);
  m.add(b, 1);
  CHECK(enabled(n, m).empty());

  const Marking later = delay(n, m, 1);
  CHECK(later.tokens(a) == std::vector<Age>{1});
  const auto bs = enabled(n, later);
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].transition == t);
  CHECK(bs[0].ages == std::vector<Age>{1, 2});

  const Marking after = fire(n, later, bs[0]);
  CHECK(after.count(a) == 0);
  CHECK(after.count(b) == 0);
  CHECK(after.tokens(c) == std::vector<Age>{2});
  CHECK(after.tokens(d) == std::vector<Age>{0});

  CHECK_THROWS_AS(fire(n, m, bs[0]), std::invalid_argument);
  CHECK(enabled(n, delay(n, m, 3)).empty());
}

TEST_CASE("one binding per distinct age combination") {
  Tapn n;
  const auto p = n.add_place("p");
  const auto t = n.add_transition("t");
  n.add_input_arc(p, t, Guard::any());
  Marking m(1);
  m.add(p, 0);
  m.add(p, 0);
  m.add(p, 4);
  CHECK(enabled(n, m).size() == 2);
}

TEST_CASE("input slots list normal arcs before transport arcs") {
  Tapn n;
  const auto p = n.add_place("p");
  const auto q = n.add_place("q");
  const auto r = n.add_place("r");
  const auto t = n.add_transition("t");
  n.add_transport_arc(p, t, r, Guard::any());
  n.add_input_arc(q, t, Guard::exactly(1));
  const auto slots = n.input_slots(t);
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].place == q);
  CHECK_FALSE(slots[0].transport);
  CHECK(slots[1].place == p);
  CHECK(slots[1].transport);
}

TEST_CASE("largest constant and relaxation") {
  Tapn n;
  const auto p = n.add_place("p");
  const auto q = n.add_place("q");
  const auto r = n.add_place("r");
  const auto t = n.add_transition("t");
  CHECK(n.max_constant() == 0);
  n.add_input_arc(p, t, Guard::closed(2, 7));
  n.add_transport_arc(q, t, r, Guard::at_least(9));
  CHECK(n.max_constant() == 9);
  CHECK_FALSE(n.has_right_open_finite_guard());
  const Tapn relaxed = n.relaxed();
  CHECK(relaxed.max_constant() == 0);
  CHECK(relaxed.input_arcs()[0].guard == Guard::any());
  CHECK(relaxed.transport_arcs()[0].guard == Guard::any());
  CHECK(relaxed.place_count() == n.place_count());
}

TEST_CASE("target matches exact counts and ignores ages") {
  Marking m(3);
  m.add(PlaceId{1}, 8);
  CHECK(TargetSpec{{{PlaceId{1}, 1}}}.matches(m));
  CHECK_FALSE(TargetSpec{{{PlaceId{1}, 2}}}.matches(m));
  m.add(PlaceId{2}, 0);
  CHECK_FALSE(TargetSpec{{{PlaceId{1}, 1}}}.matches(m));
}

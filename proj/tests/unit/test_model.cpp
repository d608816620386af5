#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "virtint/model.hpp"
#include "virtint/parser.hpp"

using namespace virtint;
using virtint::testing::fixture_path;
using virtint::testing::read_text;
using virtint::testing::tcsd_from_json;

namespace {

bool has_clause(const ValidationResult& r, Clause c) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.clause == c; });
}

ValidationResult validate_dsl(const std::string& dsl) { return validate(parse_tcsd(dsl).tcsd); }

}  // namespace

TEST_CASE("diagram with only the implicit zero line is valid") {
  const auto r = validate_dsl("tcsd Empty { sut S test T }");
  REQUIRE(r.ok());
  const Tcsd& t = r.validated->tcsd();
  REQUIRE(t.partitions.size() == 1);
  CHECK(t.partitions[0].timestamp == 0);
  CHECK(t.partitions[0].events.size() == 2);
  CHECK(r.validated->walk().size() == 1);
  CHECK(r.validated->walk().at(0) == std::string(kImplicitPartitionPrefix) + "S");
}

TEST_CASE("explicit zero line suppresses the implicit one") {
  const auto r = validate_dsl("tcsd Z { sut S test T at 0 msg S -> T : a }");
  REQUIRE(r.ok());
  CHECK(r.validated->tcsd().partitions.size() == 1);
  CHECK(r.validated->walk().size() == 2);
}

TEST_CASE("two partition lines at the same time violate uniqueness") {
  const auto r = validate_dsl("tcsd U { sut S test T msg S -> T : a at 5 msg T -> S : b at 5 }");
  REQUIRE_FALSE(r.ok());
  CHECK(has_clause(r, Clause::PartitionUniqueness));
  CHECK(to_string(Clause::PartitionUniqueness).find("uniqueness") != std::string_view::npos);
  CHECK_FALSE(r.validated.has_value());
}

TEST_CASE("two-fragment nesting cycle violates no self-nesting") {
  const auto r = validate(tcsd_from_json(read_text(fixture_path("validator/no_self_nesting.bad.json"))));
  CHECK(has_clause(r, Clause::NoSelfNesting));
  const auto fixed = validate(tcsd_from_json(read_text(fixture_path("validator/no_self_nesting.good.json"))));
  CHECK(fixed.ok());
}

TEST_CASE("unknown message endpoint is malformed and stops semantic checks") {
  Tcsd t = parse_tcsd("tcsd M { sut S test T msg S -> T : a at 5 at 5 }").tcsd;
  t.base.messages[0].receive = "nowhere";
  const auto r = validate(t);
  REQUIRE_FALSE(r.ok());
  for (const auto& v : r.violations) CHECK(v.clause == Clause::Malformed);
}

TEST_CASE("operand count and loop bound") {
  Tcsd t = parse_tcsd("tcsd F { sut S test T par { op { msg S -> T : a } op { msg T -> S : b } } }").tcsd;
  SUBCASE("par with a single operand") {
    auto& f = t.base.fragments[0];
    for (const auto& e : f.operands[1].events) f.operands[0].events.insert(e);
    f.operands.pop_back();
    CHECK(has_clause(validate(t), Clause::OperandCount));
  }
  SUBCASE("loop without a bound") {
    t.base.fragments[0].op = Operator::Loop;
    CHECK(has_clause(validate(t), Clause::LoopBound));
  }
  SUBCASE("bound on a non-loop") {
    t.base.fragments[0].loop_bound = 2;
    CHECK(has_clause(validate(t), Clause::LoopBound));
  }
}

TEST_CASE("message between two test lines violates the sut endpoint rule") {
  const auto r = validate_dsl("tcsd X { sut S test T test U msg T -> U : a }");
  CHECK(has_clause(r, Clause::SutEndpoint));
}

TEST_CASE("partition inside a fragment cuts it") {
  const auto r = validate_dsl("tcsd C { sut S test T opt { msg S -> T : a at 2 } }");
  CHECK(has_clause(r, Clause::NoFragmentCutting));
}

TEST_CASE("descending partition lines violate ordering") {
  const auto r = validate_dsl("tcsd O { sut S test T at 4 msg S -> T : a at 1 }");
  CHECK(has_clause(r, Clause::PartitionOrdering));
}

TEST_CASE("timeouts") {
  SUBCASE("reversed endpoints") {
    const auto r = validate(tcsd_from_json(read_text(fixture_path("validator/timeout_ordered.bad.json"))));
    CHECK(has_clause(r, Clause::TimeoutOrdered));
  }
  SUBCASE("endpoints in different operands") {
    const auto r = validate(tcsd_from_json(read_text(fixture_path("validator/timeout_same_fragment.bad.json"))));
    CHECK(has_clause(r, Clause::TimeoutSameFragment));
  }
  SUBCASE("timeout around a partition line") {
    const auto r = validate_dsl("tcsd P { sut S test T timeout 3 { msg S -> T : a at 2 } }");
    CHECK(has_clause(r, Clause::TimeoutSpansPartition));
  }
  SUBCASE("block timeout is valid") {
    CHECK(validate_dsl("tcsd P { sut S test T timeout 3 { msg S -> T : a msg T -> S : b } }").ok());
  }
}

TEST_CASE("sut walk visits operands one after the other") {
  const auto r = validate_dsl(
      "tcsd W { sut S test T msg T -> S : a par { op { msg S -> T : b } op { msg S -> T : c } } msg S -> T : d }");
  REQUIRE(r.ok());
  const Tcsd& t = r.validated->tcsd();
  const SutWalk& w = r.validated->walk();
  // tau0, a, enter, b, c, exit, d
  REQUIRE(w.size() == 7);
  std::vector<EventKind> kinds;
  for (const auto& id : w.order()) kinds.push_back(t.base.find_event(id)->kind);
  CHECK(kinds == std::vector<EventKind>{EventKind::Partition, EventKind::Receive, EventKind::FragmentEnter,
                                        EventKind::Send, EventKind::Send, EventKind::FragmentExit, EventKind::Send});
  const auto* span = w.span("f0");
  REQUIRE(span != nullptr);
  CHECK(span->enter == 2);
  CHECK(span->exit == 5);
  REQUIRE(span->operands.size() == 2);
  CHECK(span->operands[0].begin == 3);
  CHECK(span->operands[0].end == 4);
  CHECK(span->operands[1].begin == 4);
  CHECK(span->operands[1].end == 5);
  CHECK(w.next(w.at(6)) == std::nullopt);
  CHECK(w.next(w.at(0)) == w.at(1));
  CHECK(w.first("f0", 1) == w.at(4));
}

TEST_CASE("partitions are sorted by time after validation") {
  Tcsd t = parse_tcsd("tcsd S2 { sut S test T at 1 msg S -> T : a at 3 }").tcsd;
  std::swap(t.partitions[0], t.partitions[1]);
  const auto r = validate(t);
  REQUIRE(r.ok());
  CHECK(r.validated->tcsd().partitions[1].timestamp == 1);
  CHECK(r.validated->tcsd().partitions[2].timestamp == 3);
}

TEST_CASE("validation is deterministic") {
  const auto t = tcsd_from_json(read_text(fixture_path("validator/containment.bad.json")));
  CHECK(validate(t).violations == validate(t).violations);
}

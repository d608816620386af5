// Shared helpers for the unit and acceptance tests.
#ifndef VIRTINT_TEST_SUPPORT_HPP
#define VIRTINT_TEST_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "virtint/model.hpp"
#include "virtint/parser.hpp"
#include "virtint/tapn.hpp"
#include "virtint/translate.hpp"

namespace virtint::testing {

std::string fixture_path(const std::string& relative);
std::string read_text(const std::string& path);

/// Raw diagram from the JSON fixture format used for shapes the DSL cannot
/// write down. Lifelines follow the order of the "events" array.
Tcsd tcsd_from_json(const std::string& text);

/// Parses one diagram and validates it; throws std::runtime_error listing the
/// violations when it is not valid.
ValidatedTcsd valid(const std::string& dsl);
ValidatedTcsd valid(const Tcsd& tcsd);

/// Every diagram of the DSL file at `relative`, translated.
std::vector<TranslationUnit> translate_file(const std::string& relative);

/// Exhaustive search over exact token ages: at most `max_firings` firings,
/// each preceded by a delay in 0..max_constant()+1.
bool naive_reachable(const Tapn& net, const Marking& m0, const TargetSpec& target, std::size_t max_firings);

struct RandomNet {
  Tapn net;
  Marking m0;
  TargetSpec target;
};

/// Acyclic net (arcs only run from lower to higher place ids) with at most
/// `max_places` places and closed or [a,inf) guards using constants <= max_const.
RandomNet random_net(std::mt19937& rng, std::size_t max_places, Age max_const);

struct RandomTcsdShape {
  std::size_t max_sut_events = 12;
  std::size_t max_depth = 2;
};

/// DSL text of a random valid diagram: ascending partition lines at top
/// level, properly nested timeouts, fragments up to `max_depth` levels.
std::string random_tcsd(std::mt19937& rng, const std::string& name, const RandomTcsdShape& shape = {});

}  // namespace virtint::testing

#endif  // VIRTINT_TEST_SUPPORT_HPP

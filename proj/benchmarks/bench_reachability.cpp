#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "virtint/integrate.hpp"
#include "virtint/parser.hpp"
#include "virtint/translate.hpp"

namespace {

std::string read_fixture(const std::string& relative) {
  std::ifstream in(std::string(VIRTINT_FIXTURES_DIR) + "/" + relative);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Bscu {
  std::vector<virtint::ValidatedTcsd> tcsds;
  std::vector<virtint::TranslationUnit> units;
  virtint::InstanceMap map;
};

Bscu load(const std::string& dir) {
  Bscu b;
  std::vector<const virtint::Tcsd*> raw;
  for (const char* f : {"tc_command.tcsd", "tc_monitor.tcsd", "tc_switch.tcsd"}) {
    auto r = virtint::validate(virtint::parse_tcsd(read_fixture(dir + "/" + f)).tcsd);
    b.tcsds.push_back(std::move(*r.validated));
  }
  for (const auto& t : b.tcsds) {
    raw.push_back(&t.tcsd());
    b.units.push_back(virtint::translate(t));
  }
  b.map = virtint::bind_instances(virtint::parse_architecture(read_fixture(dir + "/bscu.arch")), raw);
  return b;
}

void BM_CheckBscu(benchmark::State& state) {
  const Bscu b = load(state.range(0) == 0 ? "bscu" : "bscu_repaired");
  for (auto _ : state) benchmark::DoNotOptimize(virtint::check_consistency(b.units, b.map));
}
BENCHMARK(BM_CheckBscu)->Arg(0)->Arg(1);

void BM_TranslateBscu(benchmark::State& state) {
  const Bscu b = load("bscu");
  for (auto _ : state) {
    for (const auto& t : b.tcsds) benchmark::DoNotOptimize(virtint::translate(t));
  }
}
BENCHMARK(BM_TranslateBscu);

// Chain of n transitions, each guarded [1,1]: one delay per step.
void BM_ReachChain(benchmark::State& state) {
  virtint::Tapn net;
  const auto n = static_cast<std::size_t>(state.range(0));
  auto prev = net.add_place("p0");
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = net.add_transition("t" + std::to_string(k));
    const auto next = net.add_place("p" + std::to_string(k + 1));
    net.add_transport_arc(prev, t, next, virtint::Guard::closed(k, k + 1));
    prev = next;
  }
  virtint::Marking m0(net.place_count());
  m0.add(virtint::PlaceId{0}, 0);
  const virtint::TargetSpec target{{{prev, 1}}};
  for (auto _ : state) benchmark::DoNotOptimize(virtint::reachable(net, m0, target));
}
BENCHMARK(BM_ReachChain)->Arg(8)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();

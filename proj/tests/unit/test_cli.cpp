#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "virtint/cli.hpp"

using virtint::testing::fixture_path;
using virtint::testing::read_text;
namespace cli = virtint::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fx(const std::string& relative) { return fixture_path(relative); }

std::string scratch(const std::string& name) {
  const fs::path dir = fs::path(VIRTINT_BINARY_DIR) / "cli_scratch";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p.string();
}

std::vector<std::string> bscu_args(const std::string& dir) {
  return {"check", "--arch", fx(dir + "/bscu.arch"), fx(dir + "/tc_command.tcsd"), fx(dir + "/tc_monitor.tcsd"),
          fx(dir + "/tc_switch.tcsd")};
}

}  // namespace

TEST_CASE("usage") {
  CHECK(run({}).code == cli::kError);
  CHECK(run({"frobnicate"}).code == cli::kError);
  const Run help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("check") != std::string::npos);
  CHECK(run({"check", fx("bscu/tc_command.tcsd")}).code == cli::kError);
  CHECK(run({"check", "--arch", fx("bscu/bscu.arch"), "--max-states", "0", fx("bscu/tc_command.tcsd"),
             fx("bscu/tc_monitor.tcsd")})
            .code == cli::kError);
}

TEST_CASE("validate") {
  SUBCASE("valid files") {
    const Run r = run({"validate", fx("bscu/tc_command.tcsd"), fx("timing/tc_a.tcsd")});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "ok: 2 test case(s) valid in 2 file(s)\n");
    CHECK(r.err.empty());
  }
  SUBCASE("clause violation names the clause and the position") {
    const std::string file = fx("validator/partition_uniqueness.bad.tcsd");
    const Run r = run({"validate", file});
    CHECK(r.code == cli::kFailed);
    CHECK(r.out.empty());
    CHECK(r.err.find(file + ":") != std::string::npos);
    CHECK(r.err.find("partition uniqueness") != std::string::npos);
  }
  SUBCASE("syntax error") {
    const std::string bad = scratch("syntax.tcsd");
    std::ofstream(bad) << "tcsd A { sut S test T msg S T : a }";
    const Run r = run({"validate", bad});
    CHECK(r.code == cli::kFailed);
    CHECK(r.out.empty());
    CHECK(r.err.find(bad + ":1:") != std::string::npos);
  }
  SUBCASE("missing file") {
    const Run r = run({"validate", fx("nope.tcsd")});
    CHECK(r.code == cli::kError);
    CHECK(r.out.empty());
  }
}

TEST_CASE("colour only when asked for") {
  const std::string file = fx("validator/partition_uniqueness.bad.tcsd");
  ::unsetenv("VIRTINT_COLOR");
  CHECK(run({"validate", file}).err.find("\033[") == std::string::npos);
  ::setenv("VIRTINT_COLOR", "1", 1);
  CHECK(run({"validate", file}).err.find("\033[") != std::string::npos);
  ::setenv("VIRTINT_COLOR", "0", 1);
  CHECK(run({"validate", file}).err.find("\033[") == std::string::npos);
  ::unsetenv("VIRTINT_COLOR");
}

TEST_CASE("translate writes DOT and TAPAAL files") {
  const std::string dot = scratch("tc_a.dot");
  const std::string xml = scratch("tc_a.xml");
  const Run r = run({"translate", fx("timing/tc_a.tcsd"), "--dot", dot, "--tapaal", xml});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("TC_A:") == 0);
  CHECK(read_text(dot).rfind("digraph \"TC_A\"", 0) == 0);
  CHECK(read_text(xml).find("<pnml") != std::string::npos);

  const Run missing = run({"translate", fx("bscu/tc_command.tcsd"), "--name", "Nope"});
  CHECK(missing.code == cli::kError);
  CHECK(missing.out.empty());
  CHECK(run({"translate", fx("validator/sut_endpoint.bad.tcsd")}).code == cli::kFailed);
}

TEST_CASE("check on the brake-control fixtures") {
  SUBCASE("original orders deadlock") {
    const std::string report = scratch("bscu.json");
    auto args = bscu_args("bscu");
    args.insert(args.end(), {"--report", report});
    const Run r = run(args);
    CHECK(r.code == cli::kFailed);
    CHECK(r.out.empty());
    CHECK(r.err.find("inconsistent") != std::string::npos);
    CHECK(r.err.find("ordering deadlock") != std::string::npos);
    const auto j = nlohmann::json::parse(read_text(report));
    CHECK(j["overall"] == "inconsistent");
    REQUIRE(j["inputs"].size() == 4);
    CHECK(j["inputs"][0]["file"] == fx("bscu/bscu.arch"));
    CHECK(j["inputs"][0]["sha256"].get<std::string>().size() == 64);
  }
  SUBCASE("repaired orders are consistent") {
    const std::string dot = scratch("merged.dot");
    const std::string xml = scratch("merged.xml");
    auto args = bscu_args("bscu_repaired");
    args.insert(args.end(), {"--dot", dot, "--tapaal", xml});
    const Run r = run(args);
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("consistent") != std::string::npos);
    CHECK(read_text(dot).find("+") != std::string::npos);
    CHECK(fs::file_size(xml) > 0);
  }
  SUBCASE("output path equal to an input is refused") {
    auto args = bscu_args("bscu");
    args.insert(args.end(), {"--report", fx("bscu/tc_switch.tcsd")});
    CHECK(run(args).code == cli::kError);
  }
  SUBCASE("state bound hit gives inconclusive") {
    auto args = bscu_args("bscu_repaired");
    args.insert(args.end(), {"--max-states", "2"});
    const Run r = run(args);
    CHECK(r.code == cli::kInconclusive);
    CHECK(r.out.empty());
  }
}

TEST_CASE("timing conflict exits with failure") {
  const Run r = run({"check", "--arch", fx("timing/timing.arch"), fx("timing/tc_a.tcsd"), fx("timing/tc_b.tcsd")});
  CHECK(r.code == cli::kFailed);
  CHECK(r.err.find("timing conflict") != std::string::npos);
}

TEST_CASE("require-all fails when one of two matchings deadlocks") {
  const std::vector<std::string> base{"check", "--arch", fx("two_matchings/pair.arch"), fx("two_matchings/tc_a.tcsd"),
                                      fx("two_matchings/tc_b.tcsd")};
  CHECK(run(base).code == cli::kOk);
  auto all = base;
  all.push_back("--require-all");
  const Run r = run(all);
  CHECK(r.code == cli::kFailed);
  CHECK(r.out.empty());
}

TEST_CASE("strict policy with unequal multiplicities is a usage error") {
  const std::string a = scratch("strict_a.tcsd");
  std::ofstream(a) << "tcsd TC_A { sut SA test TB msg SA -> TB : x msg SA -> TB : x }\n";
  const std::string b = scratch("strict_b.tcsd");
  std::ofstream(b) << "tcsd TC_B { sut SB test TA msg TA -> SB : x }\n";
  const std::vector<std::string> args{"check", "--arch", fx("two_matchings/pair.arch"), a, b};
  CHECK(run(args).code == cli::kOk);
  auto strict = args;
  strict.insert(strict.end(), {"--policy", "strict"});
  const Run r = run(strict);
  CHECK(r.code == cli::kError);
  CHECK(r.err.find("x") != std::string::npos);
}

TEST_CASE("several test cases for one component") {
  const std::string extra = scratch("tc_switch2.tcsd");
  std::ofstream(extra) << "tcsd TC_Switch2 {\n  sut Switch\n  test C\n  test M\n  msg M -> Switch : Status\n"
                          "  par {\n    op { msg C -> Switch : CMD1 }\n    op { msg C -> Switch : AntiSkid1 }\n  }\n}\n";
  const std::string arch = scratch("bscu2.arch");
  std::ofstream(arch) << read_text(fx("bscu/bscu.arch")).substr(0, read_text(fx("bscu/bscu.arch")).rfind('}'))
                      << "  bind TC_Switch2 {\n    sut = Switch\n    C -> Command1\n    M -> Monitor1\n  }\n}\n";
  std::vector<std::string> args{"check", "--arch", arch, fx("bscu/tc_command.tcsd"), fx("bscu/tc_monitor.tcsd"),
                                fx("bscu/tc_switch.tcsd"), extra};
  const Run refused = run(args);
  CHECK(refused.code == cli::kError);
  CHECK(refused.err.find("--cross-product") != std::string::npos);

  const std::string report = scratch("cross.json");
  args.insert(args.end(), {"--cross-product", "--report", report});
  const Run r = run(args);
  CHECK(r.code == cli::kFailed);
  const auto j = nlohmann::json::parse(read_text(report));
  REQUIRE(j.is_array());
  CHECK(j.size() == 2);
}

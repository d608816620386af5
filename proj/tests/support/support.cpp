#include "support.hpp"

#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef VIRTINT_FIXTURES_DIR
#error "VIRTINT_FIXTURES_DIR must point at tests/fixtures"
#endif

namespace virtint::testing {

std::string fixture_path(const std::string& relative) { return std::string(VIRTINT_FIXTURES_DIR) + "/" + relative; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

EventKind kind_from(const std::string& s) {
  if (s == "send") return EventKind::Send;
  if (s == "receive") return EventKind::Receive;
  if (s == "enter") return EventKind::FragmentEnter;
  if (s == "exit") return EventKind::FragmentExit;
  if (s == "partition") return EventKind::Partition;
  if (s == "timeout-start") return EventKind::TimeoutStart;
  if (s == "timeout-end") return EventKind::TimeoutEnd;
  throw std::runtime_error("unknown event kind " + s);
}

Operator op_from(const std::string& s) {
  if (s == "strict") return Operator::Strict;
  if (s == "par") return Operator::Par;
  if (s == "opt") return Operator::Opt;
  if (s == "alt") return Operator::Alt;
  if (s == "loop") return Operator::Loop;
  throw std::runtime_error("unknown operator " + s);
}

}  // namespace

Tcsd tcsd_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Tcsd t;
  t.base.name = j.at("name").get<std::string>();
  t.sut = j.at("sut").get<std::string>();
  t.base.instances = j.at("instances").get<std::vector<std::string>>();
  for (const auto& i : t.base.instances) t.base.lifelines[i];
  for (const auto& e : j.at("events")) {
    Event ev{e.at(0).get<std::string>(), e.at(1).get<std::string>(), kind_from(e.at(2).get<std::string>()), {}};
    if (e.size() > 3) ev.fragment = e.at(3).get<std::string>();
    t.base.lifelines[ev.instance].push_back(ev.id);
    t.base.events.push_back(std::move(ev));
  }
  for (const auto& m : j.value("messages", nlohmann::json::array())) {
    t.base.messages.push_back(Message{m.at(0).get<std::string>(), m.at(1).get<std::string>(), m.at(2).get<std::string>()});
  }
  for (const auto& f : j.value("fragments", nlohmann::json::array())) {
    Fragment frag;
    frag.id = f.at("id").get<std::string>();
    frag.op = op_from(f.at("op").get<std::string>());
    if (f.contains("loop")) frag.loop_bound = f.at("loop").get<std::uint32_t>();
    for (const auto& o : f.at("operands")) {
      Operand operand;
      for (const auto& e : o.value("events", nlohmann::json::array())) operand.events.insert(e.get<std::string>());
      operand.children = o.value("children", std::vector<std::string>{});
      frag.operands.push_back(std::move(operand));
    }
    t.base.fragments.push_back(std::move(frag));
  }
  for (const auto& p : j.value("partitions", nlohmann::json::array())) {
    t.partitions.push_back(PartitionLine{p.at("events").get<std::vector<std::string>>(), p.at("at").get<Ticks>()});
  }
  for (const auto& c : j.value("timeouts", nlohmann::json::array())) {
    t.timeouts.push_back(Timeout{c.at("start").get<std::string>(), c.at("end").get<std::string>(), c.at("bound").get<Ticks>()});
  }
  return t;
}

ValidatedTcsd valid(const Tcsd& tcsd) {
  ValidationResult r = validate(tcsd);
  if (!r.ok()) {
    std::string msg = tcsd.name() + " is not valid:";
    for (const auto& v : r.violations) msg += "\n  " + std::string(to_string(v.clause)) + ": " + v.detail;
    throw std::runtime_error(msg);
  }
  return std::move(*r.validated);
}

ValidatedTcsd valid(const std::string& dsl) { return valid(parse_tcsd(dsl).tcsd); }

std::vector<TranslationUnit> translate_file(const std::string& relative) {
  std::vector<TranslationUnit> out;
  for (const auto& parsed : parse_tcsd_file(read_text(fixture_path(relative)), relative)) {
    out.push_back(translate(valid(parsed.tcsd)));
  }
  return out;
}

bool naive_reachable(const Tapn& net, const Marking& m0, const TargetSpec& target, std::size_t max_firings) {
  const Age cap = net.max_constant() + 1;
  Marking start = m0;
  start.resize(net.place_count());
  if (target.matches(start)) return true;
  std::set<std::vector<std::vector<Age>>> seen{start.raw()};
  std::deque<std::pair<Marking, std::size_t>> queue{{start, 0}};
  while (!queue.empty()) {
    auto [m, depth] = queue.front();
    queue.pop_front();
    if (depth == max_firings) continue;
    for (Age d = 0; d <= cap; ++d) {
      const Marking delayed = delay(net, m, d);
      for (const auto& b : enabled(net, delayed)) {
        Marking next = fire(net, delayed, b);
        if (target.matches(next)) return true;
        if (seen.insert(next.raw()).second) queue.emplace_back(std::move(next), depth + 1);
      }
    }
  }
  return false;
}

namespace {

std::size_t pick(std::mt19937& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Guard random_guard(std::mt19937& rng, Age max_const) {
  switch (pick(rng, 0, 3)) {
    case 0: return Guard::any();
    case 1: return Guard::at_least(static_cast<Age>(pick(rng, 0, max_const)));
    default: {
      const Age a = static_cast<Age>(pick(rng, 0, max_const));
      return Guard::closed(a, static_cast<Age>(pick(rng, a, max_const)));
    }
  }
}

}  // namespace

RandomNet random_net(std::mt19937& rng, std::size_t max_places, Age max_const) {
  RandomNet r;
  const std::size_t places = pick(rng, 2, max_places);
  for (std::size_t k = 0; k < places; ++k) r.net.add_place("p" + std::to_string(k));
  const std::size_t transitions = pick(rng, 1, 5);
  for (std::size_t k = 0; k < transitions; ++k) {
    const TransitionId t = r.net.add_transition("t" + std::to_string(k));
    std::set<std::uint32_t> inputs;
    const std::size_t n_in = pick(rng, 1, 2);
    while (inputs.size() < n_in && inputs.size() < places - 1) {
      inputs.insert(static_cast<std::uint32_t>(pick(rng, 0, places - 2)));
    }
    const std::uint32_t pivot = *inputs.rbegin();
    std::vector<std::uint32_t> later;
    for (std::uint32_t p = pivot + 1; p < places; ++p) later.push_back(p);
    std::shuffle(later.begin(), later.end(), rng);
    std::size_t next_out = 0;
    for (std::uint32_t p : inputs) {
      const Guard g = random_guard(rng, max_const);
      if (next_out < later.size() && pick(rng, 0, 1) == 1) {
        r.net.add_transport_arc(PlaceId{p}, t, PlaceId{later[next_out++]}, g);
      } else {
        r.net.add_input_arc(PlaceId{p}, t, g);
      }
    }
    const std::size_t n_out = pick(rng, 0, 2);
    for (std::size_t k2 = 0; k2 < n_out && next_out < later.size(); ++k2) {
      r.net.add_output_arc(t, PlaceId{later[next_out++]});
    }
  }

  r.m0 = Marking(places);
  const std::size_t tokens = pick(rng, 1, 3);
  for (std::size_t k = 0; k < tokens; ++k) {
    r.m0.add(PlaceId{static_cast<std::uint32_t>(pick(rng, 0, places - 2))}, static_cast<Age>(pick(rng, 0, 2)));
  }

  Marking end = r.m0;
  if (pick(rng, 0, 1) == 0) {
    // Target from a random run, so that reachable instances are common.
    const Age cap = r.net.max_constant() + 1;
    for (std::size_t step = pick(rng, 0, 6); step > 0; --step) {
      const Marking delayed = delay(r.net, end, pick(rng, 0, cap));
      const auto bindings = enabled(r.net, delayed);
      if (bindings.empty()) break;
      end = fire(r.net, delayed, bindings[pick(rng, 0, bindings.size() - 1)]);
    }
  } else {
    end = Marking(places);
    for (std::size_t k = pick(rng, 1, 2); k > 0; --k) end.add(PlaceId{static_cast<std::uint32_t>(pick(rng, 0, places - 1))}, 0);
  }
  for (std::uint32_t p = 0; p < places; ++p) {
    if (end.count(PlaceId{p}) > 0) r.target.counts.emplace_back(PlaceId{p}, static_cast<std::uint32_t>(end.count(PlaceId{p})));
  }
  return r;
}

namespace {

class TcsdGenerator {
 public:
  TcsdGenerator(std::mt19937& rng, const RandomTcsdShape& shape) : rng_(rng), shape_(shape) {
    // One SUT event is kept for the implicit zero partition.
    budget_ = shape.max_sut_events - 1;
  }

  std::string run(const std::string& name) {
    std::string out = "tcsd " + name + " {\n  sut S\n  test A\n  test B\n";
    out += block(0, true, 0, "  ");
    return out + "}\n";
  }

 private:
  std::string message(const std::string& indent) {
    --budget_;
    static const char* labels[] = {"a", "b", "c", "d"};
    const std::string other = pick(rng_, 0, 1) ? "A" : "B";
    const std::string label = labels[pick(rng_, 0, 3)];
    return pick(rng_, 0, 1) ? indent + "msg S -> " + other + " : " + label + "\n"
                            : indent + "msg " + other + " -> S : " + label + "\n";
  }

  // `top`: directly on the main sequence, outside fragments and timeouts.
  std::string block(std::size_t depth, bool top, std::size_t min_messages, const std::string& indent) {
    std::string out;
    for (std::size_t k = 0; k < min_messages; ++k) out += message(indent);
    const std::size_t count = pick(rng_, 0, 4);
    for (std::size_t k = 0; k < count && budget_ > 0; ++k) {
      const std::size_t choice = pick(rng_, 0, 9);
      if (choice < 4) {
        out += message(indent);
      } else if (choice < 6 && top) {
        --budget_;
        out += indent + "at " + std::to_string(next_delta_) + "\n";
        next_delta_ += static_cast<Ticks>(pick(rng_, 1, 3));
      } else if (choice < 7 && budget_ >= 2 && depth < shape_.max_depth) {
        budget_ -= 2;
        out += indent + "timeout " + std::to_string(pick(rng_, 1, 5)) + " {\n";
        out += block(depth + 1, false, 0, indent + "  ");
        out += indent + "}\n";
      } else if (budget_ >= 2 && depth < shape_.max_depth) {
        out += fragment(depth, indent);
      } else {
        out += message(indent);
      }
      if (budget_ == 0) break;
    }
    return out;
  }

  std::string fragment(std::size_t depth, const std::string& indent) {
    budget_ -= 2;
    const std::size_t kind = pick(rng_, 0, 4);
    if (kind <= 1) {
      // par and alt need a message in every operand.
      const std::size_t operands = std::min<std::size_t>(pick(rng_, 2, 3), budget_);
      if (operands < 2) {
        budget_ += 2;
        return message(indent);
      }
      std::string out = indent + (kind == 0 ? "par" : "alt") + " {\n";
      budget_ -= operands;  // reserved for the leading messages
      for (std::size_t k = 0; k < operands; ++k) {
        ++budget_;
        out += indent + "  op {\n" + block(depth + 1, false, 1, indent + "    ") + indent + "  }\n";
      }
      return out + indent + "}\n";
    }
    static const char* heads[] = {"opt", "strict", "loop"};
    std::string head = heads[kind - 2];
    if (head == "loop") head += " " + std::to_string(pick(rng_, 0, 2));
    return indent + head + " {\n" + block(depth + 1, false, 0, indent + "  ") + indent + "}\n";
  }

  std::mt19937& rng_;
  RandomTcsdShape shape_;
  std::size_t budget_ = 0;
  Ticks next_delta_ = 0;
};

}  // namespace

std::string random_tcsd(std::mt19937& rng, const std::string& name, const RandomTcsdShape& shape) {
  return TcsdGenerator(rng, shape).run(name);
}

}  // namespace virtint::testing

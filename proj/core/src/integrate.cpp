#include "virtint/integrate.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

namespace virtint {

void InstanceMap::bind(const std::string& tcsd, const InstanceId& instance, const ComponentId& component) {
  relation_[{tcsd, instance}] = component;
}

const ComponentId& InstanceMap::component(const std::string& tcsd, const InstanceId& instance) const {
  auto it = relation_.find({tcsd, instance});
  if (it == relation_.end()) {
    throw BindingError("instance line " + instance + " of " + tcsd + " is not bound to a component");
  }
  return it->second;
}

bool InstanceMap::contains(const std::string& tcsd, const InstanceId& instance) const {
  return relation_.count({tcsd, instance}) > 0;
}

bool InstanceMap::related(const std::string& tcsd1, const InstanceId& i1, const std::string& tcsd2,
                          const InstanceId& i2) const {
  return component(tcsd1, i1) == component(tcsd2, i2);
}

InstanceMap bind_instances(const Architecture& arch, const std::vector<const Tcsd*>& tcsds) {
  InstanceMap map;
  std::map<ComponentId, std::string> tested;
  for (const Tcsd* tcsd : tcsds) {
    const std::string& name = tcsd->name();
    auto it = arch.bindings.find(name);
    if (it == arch.bindings.end()) throw BindingError("no binding for test case " + name);
    const TcsdBinding& b = it->second;

    if (auto [prev, fresh] = tested.emplace(b.sut, name); !fresh) {
      throw BindingError("test cases " + prev->second + " and " + name + " both test component " + b.sut +
                         "; run them separately or use cross-product mode");
    }
    for (const auto& [line, component] : b.tests) {
      if (std::find(tcsd->base.instances.begin(), tcsd->base.instances.end(), line) ==
              tcsd->base.instances.end() ||
          line == tcsd->sut) {
        throw BindingError("binding of " + name + " maps " + line + ", which is not a test line of " + name);
      }
    }
    for (const auto& line : tcsd->base.instances) {
      if (line == tcsd->sut) {
        map.bind(name, line, b.sut);
        continue;
      }
      auto t = b.tests.find(line);
      if (t == b.tests.end()) throw BindingError("instance line " + line + " of " + name + " is not bound");
      if (t->second == b.sut) {
        throw BindingError("test line " + line + " of " + name + " is bound to its own SUT component " + b.sut);
      }
      map.bind(name, line, t->second);
    }
  }
  return map;
}

bool compatible(const MessageOccurrence& m1, const MessageOccurrence& m2, const InstanceMap& map) {
  if (m1.tcsd == m2.tcsd) throw std::invalid_argument("compatible: both occurrences belong to " + m1.tcsd);
  const bool senders = map.related(m1.tcsd, m1.message.sender, m2.tcsd, m2.message.sender);
  const bool receivers = map.related(m1.tcsd, m1.message.receiver, m2.tcsd, m2.message.receiver);
  return senders && m1.message.label == m2.message.label && receivers;
}

std::string_view to_string(MatchPolicy policy) {
  return policy == MatchPolicy::Strict ? "strict" : "maximal";
}

namespace {

// (sender component, label, receiver component); equal keys are exactly the
// compatible occurrences.
using ClassKey = std::tuple<ComponentId, std::string, ComponentId>;

std::map<ClassKey, std::vector<TransitionId>> classes(const TranslationUnit& unit, const InstanceMap& map) {
  std::map<ClassKey, std::vector<TransitionId>> out;
  for (std::uint32_t k = 0; k < unit.info.size(); ++k) {
    const auto& info = unit.info[k];
    if (!info.message) continue;
    out[{map.component(unit.name, info.message->sender), info.message->label,
         map.component(unit.name, info.message->receiver)}]
        .push_back(TransitionId{k});
  }
  return out;
}

using Pairs = std::vector<std::pair<SourceRef, SourceRef>>;

// Number of injective maps from the smaller side into the larger, saturating.
std::size_t pairing_count(std::size_t m, std::size_t n) {
  if (m > n) std::swap(m, n);
  std::size_t total = 1;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t f = n - k;
    total = total > std::numeric_limits<std::size_t>::max() / f ? std::numeric_limits<std::size_t>::max() : total * f;
  }
  return total;
}

// The first `limit` injective maps from the smaller side into the larger one,
// in lexicographic order of the chosen indices.
std::vector<Pairs> injective_pairings(const std::string& ua, const std::vector<TransitionId>& a,
                                      const std::string& ub, const std::vector<TransitionId>& b, std::size_t limit) {
  const bool a_small = a.size() <= b.size();
  const auto& small = a_small ? a : b;
  const auto& large = a_small ? b : a;
  std::vector<Pairs> out;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(large.size(), false);
  auto rec = [&](auto&& self) -> void {
    if (out.size() >= limit) return;
    if (chosen.size() == small.size()) {
      Pairs pairs;
      for (std::size_t k = 0; k < small.size(); ++k) {
        const TransitionId ta = a_small ? small[k] : large[chosen[k]];
        const TransitionId tb = a_small ? large[chosen[k]] : small[k];
        pairs.emplace_back(SourceRef{ua, ta}, SourceRef{ub, tb});
      }
      std::sort(pairs.begin(), pairs.end());
      out.push_back(std::move(pairs));
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      chosen.push_back(j);
      self(self);
      chosen.pop_back();
      used[j] = false;
    }
  };
  rec(rec);
  return out;
}

std::string describe(const ClassKey& key) {
  return std::get<0>(key) + " -> " + std::get<2>(key) + " : " + std::get<1>(key);
}

}  // namespace

MatchingSet enumerate_matchings(const std::vector<TranslationUnit>& units, const InstanceMap& map,
                                MatchPolicy policy, std::size_t max_matchings) {
  if (units.size() < 2) throw std::invalid_argument("enumerate_matchings: needs at least two units");
  std::vector<std::map<ClassKey, std::vector<TransitionId>>> grouped;
  for (const auto& u : units) grouped.push_back(classes(u, map));

  if (policy == MatchPolicy::Strict) {
    // An occurrence whose far end is the SUT of another unit must find a
    // partner there, one for one.
    std::vector<std::string> unmatched;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const ComponentId& own = map.component(units[i].name, units[i].sut);
      for (const auto& [key, ts] : grouped[i]) {
        const ComponentId& far = std::get<0>(key) == own ? std::get<2>(key) : std::get<0>(key);
        for (std::size_t j = 0; j < units.size(); ++j) {
          if (j == i || map.component(units[j].name, units[j].sut) != far) continue;
          auto other = grouped[j].find(key);
          const std::size_t theirs = other == grouped[j].end() ? 0 : other->second.size();
          if (ts.size() > theirs) {
            unmatched.push_back(units[i].name + ": " + describe(key) + " (" + std::to_string(ts.size()) + " vs " +
                                std::to_string(theirs) + " in " + units[j].name + ")");
          }
        }
      }
    }
    if (!unmatched.empty()) {
      std::string msg = "unmatched message occurrences:";
      for (const auto& u : unmatched) msg += "\n  " + u;
      throw UnmatchedMessages(msg, unmatched);
    }
  }

  std::vector<std::vector<Pairs>> factors;
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t j = i + 1; j < units.size(); ++j) {
      for (const auto& [key, ta] : grouped[i]) {
        auto it = grouped[j].find(key);
        if (it == grouped[j].end()) continue;
        factors.push_back(injective_pairings(units[i].name, ta, units[j].name, it->second, max_matchings));
        sizes.push_back(pairing_count(ta.size(), it->second.size()));
      }
    }
  }

  MatchingSet out;
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  out.total = 1;
  for (std::size_t n : sizes) out.total = out.total > kMax / n ? kMax : out.total * n;
  out.truncated = out.total > max_matchings;

  std::vector<std::size_t> odometer(factors.size(), 0);
  while (out.matchings.size() < max_matchings) {
    SyncMatching m;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const auto& chosen = factors[k][odometer[k]];
      m.pairs.insert(m.pairs.end(), chosen.begin(), chosen.end());
    }
    out.matchings.push_back(std::move(m));
    std::size_t k = factors.size();
    while (k > 0) {
      --k;
      if (++odometer[k] < factors[k].size()) break;
      odometer[k] = 0;
      if (k == 0) return out;
    }
    if (factors.empty()) return out;
  }
  return out;
}

TranslationUnit merge(const std::vector<TranslationUnit>& units, const SyncMatching& matching) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (!index.emplace(units[k].name, k).second) {
      throw std::invalid_argument("merge: duplicate unit name " + units[k].name);
    }
  }
  // Matched transition -> position of its pair in the matching.
  std::map<SourceRef, std::size_t> matched;
  auto check = [&](const SourceRef& ref, std::size_t pair) {
    auto it = index.find(ref.unit);
    if (it == index.end()) throw std::invalid_argument("merge: unknown unit " + ref.unit);
    const auto& u = units[it->second];
    if (ref.transition.value >= u.net.transition_count()) {
      throw std::invalid_argument("merge: unknown transition in " + ref.unit);
    }
    if (!u.label(ref.transition)) {
      throw std::invalid_argument("merge: silent transition " + u.net.transition(ref.transition).name);
    }
    if (!matched.emplace(ref, pair).second) {
      throw std::invalid_argument("merge: transition " + ref.unit + "." + u.net.transition(ref.transition).name +
                                  " is matched twice");
    }
  };
  for (std::size_t k = 0; k < matching.pairs.size(); ++k) {
    const auto& [a, b] = matching.pairs[k];
    if (a.unit == b.unit) throw std::invalid_argument("merge: pair within one unit " + a.unit);
    check(a, k);
    check(b, k);
    const auto& la = units[index[a.unit]].label(a.transition);
    const auto& lb = units[index[b.unit]].label(b.transition);
    if (*la != *lb) throw std::invalid_argument("merge: paired transitions carry different labels");
  }

  TranslationUnit out;
  for (std::size_t k = 0; k < units.size(); ++k) out.name += (k ? "+" : "") + units[k].name;

  std::vector<std::vector<PlaceId>> places(units.size());
  std::vector<std::vector<TransitionId>> transitions(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    for (const auto& p : unit.net.places()) places[u].push_back(out.net.add_place(unit.name + "." + p.name));
    transitions[u].resize(unit.net.transition_count());
    for (std::uint32_t t = 0; t < unit.net.transition_count(); ++t) {
      if (matched.count(SourceRef{unit.name, TransitionId{t}})) continue;
      const auto& tr = unit.net.transition(TransitionId{t});
      transitions[u][t] = out.net.add_transition(unit.name + "." + tr.name, tr.label);
      TransitionInfo info = unit.info.at(t);
      out.info.push_back(std::move(info));
    }
  }
  for (const auto& [a, b] : matching.pairs) {
    const std::size_t ua = index[a.unit];
    const std::size_t ub = index[b.unit];
    const auto& ta = units[ua].net.transition(a.transition);
    const auto& tb = units[ub].net.transition(b.transition);
    const TransitionId t = out.net.add_transition(a.unit + "." + ta.name + "+" + b.unit + "." + tb.name, ta.label);
    transitions[ua][a.transition.value] = t;
    transitions[ub][b.transition.value] = t;
    const auto& ia = units[ua].info.at(a.transition.value);
    const auto& ib = units[ub].info.at(b.transition.value);
    TransitionInfo info;
    info.rule = Rule::Merged;
    info.event = ia.event;
    info.message = ia.message;
    info.sources = ia.sources;
    info.sources.insert(info.sources.end(), ib.sources.begin(), ib.sources.end());
    info.depth = std::max(ia.depth, ib.depth);
    out.info.push_back(std::move(info));
  }

  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& net = units[u].net;
    const auto& P = places[u];
    const auto& T = transitions[u];
    for (const auto& arc : net.input_arcs()) out.net.add_input_arc(P[arc.place.value], T[arc.transition.value], arc.guard);
    for (const auto& arc : net.output_arcs()) out.net.add_output_arc(T[arc.transition.value], P[arc.place.value]);
    for (const auto& arc : net.transport_arcs()) {
      out.net.add_transport_arc(P[arc.source.value], T[arc.transition.value], P[arc.target.value], arc.guard);
    }
  }

  out.m0 = Marking(out.net.place_count());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& m0 = units[u].m0;
    for (std::uint32_t p = 0; p < m0.place_count(); ++p) {
      for (Age a : m0.tokens(PlaceId{p})) out.m0.add(places[u][p], a);
    }
    for (const auto& [p, n] : units[u].target.counts) out.target.counts.emplace_back(places[u][p.value], n);
    for (const auto& [event, ts] : units[u].event_map) {
      auto& mapped = out.event_map[units[u].name + "." + event];
      for (TransitionId t : ts) mapped.push_back(transitions[u][t.value]);
    }
  }
  return out;
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Consistent: return "consistent";
    case Status::OrderingDeadlock: return "ordering-deadlock";
    case Status::TimingConflict: return "timing-conflict";
    case Status::BoundExceeded: return "bound-exceeded";
  }
  return "?";
}

std::string_view to_string(Overall overall) {
  switch (overall) {
    case Overall::Consistent: return "consistent";
    case Overall::Inconsistent: return "inconsistent";
    case Overall::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::uint64_t default_max_total_delay(const Tapn& net) {
  return (static_cast<std::uint64_t>(net.max_constant()) + 1) * (net.transition_count() + 1);
}

std::vector<TransitionId> blocking_transitions(const Tapn& net, const std::vector<Marking>& dead) {
  std::vector<TransitionId> out;
  for (std::uint32_t k = 0; k < net.transition_count(); ++k) {
    const TransitionId t{k};
    if (!net.transition(t).label) continue;
    const auto slots = net.input_slots(t);
    bool touched = false;
    bool ever_enabled = false;
    for (const auto& m : dead) {
      for (const auto& s : slots) touched = touched || (s.place.value < m.place_count() && m.count(s.place) > 0);
      const auto bindings = enabled(net, m);
      ever_enabled = ever_enabled || std::any_of(bindings.begin(), bindings.end(),
                                                 [&](const Binding& b) { return b.transition == t; });
    }
    if (touched && !ever_enabled) out.push_back(t);
  }
  return out;
}

Verdict analyze(const std::vector<TranslationUnit>& units, const SyncMatching& matching, const CheckOptions& opts) {
  const TranslationUnit merged = merge(units, matching);
  Verdict v;
  v.matching = matching;
  for (const auto& [a, b] : matching.pairs) {
    auto find = [&](const SourceRef& ref) -> const TranslationUnit& {
      return *std::find_if(units.begin(), units.end(), [&](const TranslationUnit& u) { return u.name == ref.unit; });
    };
    const TranslationUnit& ua = find(a);
    const TranslationUnit& ub = find(b);
    v.pairs.push_back(MatchedPair{a.unit + "." + ua.net.transition(a.transition).name,
                                  b.unit + "." + ub.net.transition(b.transition).name, *ua.label(a.transition)});
  }
  v.delay_bound = opts.max_total_delay.value_or(default_max_total_delay(merged.net));

  ReachOptions timed_opts;
  timed_opts.max_states = opts.max_states;
  timed_opts.max_total_delay = v.delay_bound;
  const ReachResult timed = reachable(merged.net, merged.m0, merged.target, timed_opts);
  v.timed = timed.verdict;
  v.stats = timed.stats;
  if (timed.verdict == ReachVerdict::Reachable) {
    v.status = Status::Consistent;
    v.trace = timed.trace;
    for (const auto& step : timed.trace) {
      const auto& tr = merged.net.transition(step.transition);
      v.witness.push_back(WitnessStep{step.delay, tr.name, tr.label});
    }
    return v;
  }

  ReachOptions untimed_opts;
  untimed_opts.max_states = opts.max_states;
  const ReachResult untimed = untimed_reachable(merged.net, merged.m0, merged.target, untimed_opts);
  v.untimed = untimed.verdict;
  if (untimed.verdict == ReachVerdict::Unreachable) {
    v.status = Status::OrderingDeadlock;
    const Tapn relaxed = merged.net.relaxed();
    std::set<std::string> labels;
    for (TransitionId t : blocking_transitions(relaxed, untimed.frontier)) {
      labels.insert(*relaxed.transition(t).label);
      v.blocking_transitions.push_back(relaxed.transition(t).name);
    }
    v.blocking.assign(labels.begin(), labels.end());
    std::sort(v.blocking_transitions.begin(), v.blocking_transitions.end());
  } else if (untimed.verdict == ReachVerdict::Reachable && timed.verdict == ReachVerdict::Unreachable) {
    v.status = Status::TimingConflict;
  } else {
    v.status = Status::BoundExceeded;
  }
  return v;
}

AnalysisReport check_consistency(const std::vector<TranslationUnit>& units, const InstanceMap& map,
                                 const CheckOptions& opts) {
  if (opts.max_matchings == 0) throw std::invalid_argument("check_consistency: max_matchings must be positive");
  AnalysisReport report;
  report.options = opts;
  for (const auto& u : units) report.units.push_back(u.name);

  const MatchingSet set = enumerate_matchings(units, map, opts.policy, opts.max_matchings);
  report.total_matchings = set.total;
  report.truncated = set.truncated;
  for (const auto& m : set.matchings) report.verdicts.push_back(analyze(units, m, opts));

  auto count = [&](auto pred) { return std::count_if(report.verdicts.begin(), report.verdicts.end(), pred); };
  const auto consistent = count([](const Verdict& v) { return v.status == Status::Consistent; });
  const auto open = count([](const Verdict& v) { return v.status == Status::BoundExceeded; });
  const auto failed = static_cast<std::ptrdiff_t>(report.verdicts.size()) - consistent - open;

  if (opts.require_all) {
    if (failed > 0) {
      report.overall = Overall::Inconsistent;
    } else if (open > 0 || set.truncated) {
      report.overall = Overall::Inconclusive;
    } else {
      report.overall = Overall::Consistent;
    }
  } else if (consistent > 0) {
    report.overall = Overall::Consistent;
  } else if (open > 0 || set.truncated) {
    report.overall = Overall::Inconclusive;
  } else {
    report.overall = Overall::Inconsistent;
  }
  return report;
}

}  // namespace virtint

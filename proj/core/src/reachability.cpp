#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "virtint/tapn.hpp"

namespace virtint {

std::string_view to_string(ReachVerdict verdict) {
  switch (verdict) {
    case ReachVerdict::Reachable: return "reachable";
    case ReachVerdict::Unreachable: return "unreachable";
    case ReachVerdict::BoundExceeded: return "bound-exceeded";
  }
  return "?";
}

namespace {

// Places in id order, each as its token count followed by its sorted ages.
using Key = std::vector<Age>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (Age a : k) {
      h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

Key encode(const Marking& m) {
  Key key;
  key.reserve(m.place_count() + m.total());
  for (const auto& ages : m.raw()) {
    key.push_back(static_cast<Age>(ages.size()));
    key.insert(key.end(), ages.begin(), ages.end());
  }
  return key;
}

struct CompiledTransition {
  std::vector<InputSlot> slots;
  std::vector<PlaceId> transport_targets;  // parallel to slots; only for transport slots
  std::vector<PlaceId> outputs;
};

class Search {
 public:
  Search(const Tapn& net, const TargetSpec& target, const ReachOptions& opts)
      : net_(net), target_(target), opts_(opts), cap_(net.max_constant() + 1) {
    for (std::uint32_t t = 0; t < net.transition_count(); ++t) {
      CompiledTransition ct;
      ct.slots = net.input_slots(TransitionId{t});
      for (const auto& s : ct.slots) {
        ct.transport_targets.push_back(s.transport ? net.transport_arcs()[s.arc].target : PlaceId{});
      }
      for (const auto& arc : net.output_arcs()) {
        if (arc.transition.value == t) ct.outputs.push_back(arc.place);
      }
      compiled_.push_back(std::move(ct));
    }
  }

  ReachResult run(Marking m0) {
    m0.resize(net_.place_count());
    m0.cap_ages(cap_);
    ReachResult result;
    discover(std::move(m0), kNoParent, TraceStep{}, 0);
    if (target_.matches(states_.front().marking)) {
      result.verdict = ReachVerdict::Reachable;
      return finish(std::move(result));
    }

    while (!queue_.empty()) {
      const auto [index, enqueued_delay] = queue_.front();
      queue_.pop_front();
      if (tracking() && states_[index].elapsed < enqueued_delay) continue;  // superseded

      bool any_successor = false;
      Marking previous;
      for (Age d = 0; d <= cap_; ++d) {
        Marking delayed = states_[index].marking;
        delayed.shift(d);
        delayed.cap_ages(cap_);
        if (d > 0 && delayed == previous) break;  // every age already saturated

        for (std::uint32_t t = 0; t < compiled_.size(); ++t) {
          for_each_binding(t, delayed, [&](const std::vector<Age>& ages) {
            any_successor = true;
            if (found_) return;
            Marking next = apply(t, delayed, ages);
            const std::uint64_t elapsed = states_[index].elapsed + d;
            if (opts_.max_total_delay && elapsed > *opts_.max_total_delay) {
              pruned_.insert(encode(next));
              return;
            }
            step(std::move(next), index, TraceStep{d, TransitionId{t}, ages}, elapsed);
          });
          if (found_ || exceeded_) break;
        }
        if (found_ || exceeded_) break;
        previous = std::move(delayed);
      }

      if (found_) {
        result.verdict = ReachVerdict::Reachable;
        return finish(std::move(result));
      }
      if (exceeded_) {
        result.verdict = ReachVerdict::BoundExceeded;
        return finish(std::move(result));
      }
      if (!any_successor && dead_seen_.insert(index).second) {
        ++dead_;
        if (result.frontier.size() < opts_.max_frontier) result.frontier.push_back(states_[index].marking);
      }
    }

    result.verdict = ReachVerdict::Unreachable;
    for (const auto& key : pruned_) {
      if (visited_.count(key) == 0) {
        result.verdict = ReachVerdict::BoundExceeded;
        break;
      }
    }
    return finish(std::move(result));
  }

 private:
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  struct State {
    Marking marking;
    std::size_t parent = kNoParent;
    TraceStep step;
    std::uint64_t elapsed = 0;
  };

  bool tracking() const { return opts_.max_total_delay.has_value(); }

  template <typename F>
  void for_each_binding(std::uint32_t t, const Marking& m, F&& f) const {
    const auto& slots = compiled_[t].slots;
    std::vector<std::vector<Age>> choices(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      for (Age a : m.tokens(slots[k].place)) {
        if (slots[k].guard.contains(a) && (choices[k].empty() || choices[k].back() != a)) {
          choices[k].push_back(a);
        }
      }
      if (choices[k].empty()) return;
    }
    std::vector<std::size_t> odometer(slots.size(), 0);
    std::vector<Age> ages(slots.size());
    for (;;) {
      for (std::size_t k = 0; k < slots.size(); ++k) ages[k] = choices[k][odometer[k]];
      f(ages);
      std::size_t k = 0;
      for (; k < slots.size(); ++k) {
        if (++odometer[k] < choices[k].size()) break;
        odometer[k] = 0;
      }
      if (k == slots.size()) return;
    }
  }

  Marking apply(std::uint32_t t, const Marking& m, const std::vector<Age>& ages) const {
    const auto& ct = compiled_[t];
    Marking out = m;
    for (std::size_t k = 0; k < ct.slots.size(); ++k) out.remove(ct.slots[k].place, ages[k]);
    for (std::size_t k = 0; k < ct.slots.size(); ++k) {
      if (ct.slots[k].transport) out.add(ct.transport_targets[k], ages[k]);
    }
    for (PlaceId p : ct.outputs) out.add(p, 0);
    return out;
  }

  void discover(Marking m, std::size_t parent, TraceStep step, std::uint64_t elapsed) {
    const std::size_t index = states_.size();
    visited_.emplace(encode(m), index);
    states_.push_back(State{std::move(m), parent, std::move(step), elapsed});
    queue_.emplace_back(index, elapsed);
    peak_ = std::max(peak_, queue_.size());
  }

  void step(Marking next, std::size_t parent, TraceStep how, std::uint64_t elapsed) {
    Key key = encode(next);
    auto it = visited_.find(key);
    if (it == visited_.end()) {
      if (states_.size() >= opts_.max_states) {
        exceeded_ = true;
        return;
      }
      const bool hit = target_.matches(next);
      discover(std::move(next), parent, std::move(how), elapsed);
      if (hit) {
        found_ = true;
        found_index_ = states_.size() - 1;
      }
      return;
    }
    // Shorter elapsed time re-opens a state so the delay bound prunes as little as possible.
    State& known = states_[it->second];
    if (tracking() && elapsed < known.elapsed) {
      known.parent = parent;
      known.step = std::move(how);
      known.elapsed = elapsed;
      queue_.emplace_back(it->second, elapsed);
      peak_ = std::max(peak_, queue_.size());
    }
  }

  ReachResult finish(ReachResult result) {
    if (result.verdict == ReachVerdict::Reachable) {
      std::size_t at = found_ ? found_index_ : 0;
      while (states_[at].parent != kNoParent) {
        result.trace.push_back(states_[at].step);
        at = states_[at].parent;
      }
      std::reverse(result.trace.begin(), result.trace.end());
    }
    result.stats.states = states_.size();
    result.stats.peak_frontier = peak_;
    result.stats.dead_markings = dead_;
    return result;
  }

  const Tapn& net_;
  const TargetSpec& target_;
  const ReachOptions& opts_;
  const Age cap_;
  std::vector<CompiledTransition> compiled_;

  std::vector<State> states_;
  std::unordered_map<Key, std::size_t, KeyHash> visited_;
  std::unordered_set<Key, KeyHash> pruned_;
  std::deque<std::pair<std::size_t, std::uint64_t>> queue_;
  std::size_t peak_ = 0;
  std::size_t dead_ = 0;
  std::unordered_set<std::size_t> dead_seen_;
  bool found_ = false;
  bool exceeded_ = false;
  std::size_t found_index_ = 0;
};

}  // namespace

ReachResult reachable(const Tapn& net, const Marking& m0, const TargetSpec& target, const ReachOptions& opts) {
  if (opts.max_states == 0 || (opts.max_total_delay && *opts.max_total_delay == 0)) {
    throw std::invalid_argument("reachable: bounds must be positive");
  }
  if (net.has_right_open_finite_guard()) {
    throw UnsupportedGuard("reachable: right-open finite guards are not supported by the discrete engine");
  }
  if (m0.place_count() > net.place_count()) throw std::invalid_argument("reachable: marking has unknown places");
  return Search(net, target, opts).run(m0);
}

ReachResult untimed_reachable(const Tapn& net, const Marking& m0, const TargetSpec& target,
                              const ReachOptions& opts) {
  return reachable(net.relaxed(), m0, target, opts);
}

std::optional<Marking> replay(const Tapn& net, const Marking& m0, const std::vector<TraceStep>& trace) {
  const Age cap = net.max_constant() + 1;
  Marking m = m0;
  m.resize(net.place_count());
  for (const auto& s : trace) {
    m = delay(net, m, s.delay);
    if (s.transition.value >= net.transition_count()) return std::nullopt;
    const auto slots = net.input_slots(s.transition);
    if (slots.size() != s.ages.size()) return std::nullopt;
    Binding b{s.transition, {}};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      // Pick the youngest exact age that the engine saw as the recorded one.
      std::optional<Age> pick;
      for (Age a : m.tokens(slots[k].place)) {
        if (std::min(a, cap) == s.ages[k]) {
          pick = a;
          break;
        }
      }
      if (!pick) return std::nullopt;
      b.ages.push_back(*pick);
    }
    if (!is_enabled(net, m, b)) return std::nullopt;
    m = fire(net, m, b);
  }
  return m;
}

}  // namespace virtint

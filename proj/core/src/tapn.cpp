#include "virtint/tapn.hpp"

#include <algorithm>
#include <limits>

namespace virtint {

Guard Guard::closed(Age lower, Age upper) {
  if (lower > upper) throw std::invalid_argument("guard: lower bound exceeds upper bound");
  return Guard{lower, upper, true};
}

Guard Guard::right_open(Age lower, Age upper) {
  if (lower >= upper) throw std::invalid_argument("guard: empty right-open interval");
  return Guard{lower, upper, false};
}

bool Guard::contains(Age age) const {
  if (age < lower) return false;
  if (!upper) return true;
  return upper_closed ? age <= *upper : age < *upper;
}

std::string to_string(const Guard& guard, const std::string& infinity) {
  std::string out = "[" + std::to_string(guard.lower) + ",";
  if (!guard.upper) return out + infinity + ")";
  return out + std::to_string(*guard.upper) + (guard.upper_closed ? "]" : ")");
}

// ---------------------------------------------------------------------------

PlaceId Tapn::add_place(std::string name) {
  places_.push_back(Place{std::move(name)});
  return PlaceId{static_cast<std::uint32_t>(places_.size() - 1)};
}

TransitionId Tapn::add_transition(std::string name, std::optional<std::string> label) {
  transitions_.push_back(Transition{std::move(name), std::move(label)});
  return TransitionId{static_cast<std::uint32_t>(transitions_.size() - 1)};
}

void Tapn::check_place(PlaceId p) const {
  if (p.value >= places_.size()) throw std::invalid_argument("tapn: unknown place");
}

void Tapn::check_transition(TransitionId t) const {
  if (t.value >= transitions_.size()) throw std::invalid_argument("tapn: unknown transition");
}

bool Tapn::has_input(PlaceId p, TransitionId t) const {
  return std::any_of(inputs_.begin(), inputs_.end(),
                     [&](const InputArc& a) { return a.place == p && a.transition == t; }) ||
         std::any_of(transports_.begin(), transports_.end(),
                     [&](const TransportArc& a) { return a.source == p && a.transition == t; });
}

bool Tapn::has_output(TransitionId t, PlaceId p) const {
  return std::any_of(outputs_.begin(), outputs_.end(),
                     [&](const OutputArc& a) { return a.place == p && a.transition == t; }) ||
         std::any_of(transports_.begin(), transports_.end(),
                     [&](const TransportArc& a) { return a.target == p && a.transition == t; });
}

void Tapn::add_input_arc(PlaceId place, TransitionId transition, Guard guard) {
  check_place(place);
  check_transition(transition);
  if (has_input(place, transition)) throw std::invalid_argument("tapn: place already feeds this transition");
  inputs_.push_back(InputArc{place, transition, guard});
}

void Tapn::add_output_arc(TransitionId transition, PlaceId place) {
  check_place(place);
  check_transition(transition);
  if (has_output(transition, place)) throw std::invalid_argument("tapn: transition already feeds this place");
  outputs_.push_back(OutputArc{transition, place});
}

void Tapn::add_transport_arc(PlaceId source, TransitionId transition, PlaceId target, Guard guard) {
  check_place(source);
  check_place(target);
  check_transition(transition);
  if (has_input(source, transition) || has_output(transition, target)) {
    throw std::invalid_argument("tapn: transport arc overlaps an existing arc");
  }
  transports_.push_back(TransportArc{source, transition, target, guard});
}

std::vector<InputSlot> Tapn::input_slots(TransitionId t) const {
  std::vector<InputSlot> slots;
  for (std::size_t k = 0; k < inputs_.size(); ++k) {
    if (inputs_[k].transition == t) slots.push_back(InputSlot{inputs_[k].place, inputs_[k].guard, false, k});
  }
  for (std::size_t k = 0; k < transports_.size(); ++k) {
    if (transports_[k].transition == t) {
      slots.push_back(InputSlot{transports_[k].source, transports_[k].guard, true, k});
    }
  }
  return slots;
}

std::optional<PlaceId> Tapn::find_place(const std::string& name) const {
  for (std::size_t k = 0; k < places_.size(); ++k) {
    if (places_[k].name == name) return PlaceId{static_cast<std::uint32_t>(k)};
  }
  return std::nullopt;
}

std::optional<TransitionId> Tapn::find_transition(const std::string& name) const {
  for (std::size_t k = 0; k < transitions_.size(); ++k) {
    if (transitions_[k].name == name) return TransitionId{static_cast<std::uint32_t>(k)};
  }
  return std::nullopt;
}

Age Tapn::max_constant() const {
  Age c = 0;
  auto visit = [&](const Guard& g) {
    c = std::max(c, g.lower);
    if (g.upper) c = std::max(c, *g.upper);
  };
  for (const auto& a : inputs_) visit(a.guard);
  for (const auto& a : transports_) visit(a.guard);
  return c;
}

bool Tapn::has_right_open_finite_guard() const {
  auto open = [](const Guard& g) { return g.upper && !g.upper_closed; };
  return std::any_of(inputs_.begin(), inputs_.end(), [&](const InputArc& a) { return open(a.guard); }) ||
         std::any_of(transports_.begin(), transports_.end(), [&](const TransportArc& a) { return open(a.guard); });
}

Tapn Tapn::relaxed() const {
  Tapn out = *this;
  for (auto& a : out.inputs_) a.guard = Guard::any();
  for (auto& a : out.transports_) a.guard = Guard::any();
  return out;
}

// ---------------------------------------------------------------------------

std::size_t Marking::total() const {
  std::size_t n = 0;
  for (const auto& ages : tokens_) n += ages.size();
  return n;
}

void Marking::add(PlaceId p, Age age) {
  auto& ages = tokens_.at(p.value);
  ages.insert(std::upper_bound(ages.begin(), ages.end(), age), age);
}

bool Marking::remove(PlaceId p, Age age) {
  auto& ages = tokens_.at(p.value);
  auto it = std::lower_bound(ages.begin(), ages.end(), age);
  if (it == ages.end() || *it != age) return false;
  ages.erase(it);
  return true;
}

void Marking::cap_ages(Age cap) {
  for (auto& ages : tokens_) {
    for (auto& a : ages) a = std::min(a, cap);
  }
}

void Marking::shift(std::uint64_t d) {
  constexpr std::uint64_t kMax = std::numeric_limits<Age>::max();
  for (auto& ages : tokens_) {
    for (auto& a : ages) a = d >= kMax - a ? static_cast<Age>(kMax) : static_cast<Age>(a + d);
  }
}

// ---------------------------------------------------------------------------

std::vector<Binding> enabled(const Tapn& net, const Marking& m) {
  std::vector<Binding> out;
  for (std::uint32_t t = 0; t < net.transition_count(); ++t) {
    const TransitionId tid{t};
    const auto slots = net.input_slots(tid);
    std::vector<std::vector<Age>> choices;
    bool possible = true;
    for (const auto& slot : slots) {
      std::vector<Age> ages;
      for (Age a : m.tokens(slot.place)) {
        if (slot.guard.contains(a) && (ages.empty() || ages.back() != a)) ages.push_back(a);
      }
      if (ages.empty()) {
        possible = false;
        break;
      }
      choices.push_back(std::move(ages));
    }
    if (!possible) continue;

    std::vector<std::size_t> odometer(choices.size(), 0);
    for (;;) {
      Binding b{tid, {}};
      for (std::size_t k = 0; k < choices.size(); ++k) b.ages.push_back(choices[k][odometer[k]]);
      out.push_back(std::move(b));
      std::size_t k = 0;
      for (; k < choices.size(); ++k) {
        if (++odometer[k] < choices[k].size()) break;
        odometer[k] = 0;
      }
      if (k == choices.size()) break;
    }
  }
  return out;
}

bool is_enabled(const Tapn& net, const Marking& m, const Binding& binding) {
  if (binding.transition.value >= net.transition_count()) return false;
  const auto slots = net.input_slots(binding.transition);
  if (slots.size() != binding.ages.size()) return false;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& ages = m.tokens(slots[k].place);
    if (!slots[k].guard.contains(binding.ages[k])) return false;
    if (!std::binary_search(ages.begin(), ages.end(), binding.ages[k])) return false;
  }
  return true;
}

Marking fire(const Tapn& net, const Marking& m, const Binding& binding) {
  if (!is_enabled(net, m, binding)) throw std::invalid_argument("fire: binding is not enabled");
  Marking out = m;
  const auto slots = net.input_slots(binding.transition);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    out.remove(slots[k].place, binding.ages[k]);
  }
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].transport) out.add(net.transport_arcs()[slots[k].arc].target, binding.ages[k]);
  }
  for (const auto& arc : net.output_arcs()) {
    if (arc.transition == binding.transition) out.add(arc.place, 0);
  }
  return out;
}

Marking delay(const Tapn& /*net*/, const Marking& m, std::uint64_t d) {
  Marking out = m;
  out.shift(d);
  return out;
}

bool TargetSpec::matches(const Marking& m) const {
  std::size_t listed = 0;
  for (const auto& [p, n] : counts) {
    if (p.value >= m.place_count() || m.count(p) != n) return false;
    listed += n;
  }
  return m.total() == listed;
}

}  // namespace virtint

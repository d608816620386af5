// Timed-arc Petri nets with transport arcs, integer token ages, and a
// discrete-time reachability engine.
#ifndef VIRTINT_TAPN_HPP
#define VIRTINT_TAPN_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace virtint {

template <typename Tag>
struct Index {
  std::uint32_t value = 0;

  friend auto operator<=>(const Index&, const Index&) = default;
};

using PlaceId = Index<struct PlaceTag>;
using TransitionId = Index<struct TransitionTag>;

using Age = std::uint32_t;

/// Interval guard [lower, upper] or [lower, upper); upper == nullopt is infinity.
struct Guard {
  Age lower = 0;
  std::optional<Age> upper;
  bool upper_closed = false;

  static Guard any() { return Guard{0, std::nullopt, false}; }
  static Guard at_least(Age lower) { return Guard{lower, std::nullopt, false}; }
  static Guard closed(Age lower, Age upper);
  static Guard right_open(Age lower, Age upper);
  static Guard exactly(Age value) { return closed(value, value); }

  bool contains(Age age) const;
  bool is_unbounded() const { return !upper.has_value(); }

  friend bool operator==(const Guard&, const Guard&) = default;
};

/// "[0,inf)", "[5,5]", "[2,4)". `infinity` spells the unbounded end.
std::string to_string(const Guard& guard, const std::string& infinity = "inf");

struct Place {
  std::string name;
};

struct Transition {
  std::string name;
  /// nullopt is the silent label.
  std::optional<std::string> label;
};

struct InputArc {
  PlaceId place;
  TransitionId transition;
  Guard guard;
};

struct OutputArc {
  TransitionId transition;
  PlaceId place;
};

struct TransportArc {
  PlaceId source;
  TransitionId transition;
  PlaceId target;
  Guard guard;
};

/// One token-consuming connection of a transition, in binding order.
struct InputSlot {
  PlaceId place;
  Guard guard;
  bool transport = false;
  std::size_t arc = 0;  // index into input_arcs() or transport_arcs()
};

class Tapn {
 public:
  PlaceId add_place(std::string name);
  TransitionId add_transition(std::string name, std::optional<std::string> label = std::nullopt);

  /// Throw std::invalid_argument when an arc breaks the flow-relation rules:
  /// each (place, transition) and (transition, place) pair is connected at
  /// most once, counting transport arcs on both of their ends.
  void add_input_arc(PlaceId place, TransitionId transition, Guard guard);
  void add_output_arc(TransitionId transition, PlaceId place);
  void add_transport_arc(PlaceId source, TransitionId transition, PlaceId target, Guard guard);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  const Place& place(PlaceId p) const { return places_.at(p.value); }
  const Transition& transition(TransitionId t) const { return transitions_.at(t.value); }
  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<InputArc>& input_arcs() const { return inputs_; }
  const std::vector<OutputArc>& output_arcs() const { return outputs_; }
  const std::vector<TransportArc>& transport_arcs() const { return transports_; }

  /// Normal input arcs first, then transport arcs, each in insertion order.
  std::vector<InputSlot> input_slots(TransitionId t) const;

  std::optional<PlaceId> find_place(const std::string& name) const;
  std::optional<TransitionId> find_transition(const std::string& name) const;

  /// Largest finite guard constant, 0 for a net without guards.
  Age max_constant() const;
  bool has_right_open_finite_guard() const;

  /// Copy with every guard replaced by [0,inf).
  Tapn relaxed() const;

 private:
  void check_place(PlaceId p) const;
  void check_transition(TransitionId t) const;
  bool has_input(PlaceId p, TransitionId t) const;
  bool has_output(TransitionId t, PlaceId p) const;

  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<InputArc> inputs_;
  std::vector<OutputArc> outputs_;
  std::vector<TransportArc> transports_;
};

/// Finite multiset of token ages per place; ages kept sorted.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : tokens_(places) {}

  std::size_t place_count() const { return tokens_.size(); }
  const std::vector<Age>& tokens(PlaceId p) const { return tokens_.at(p.value); }
  std::size_t count(PlaceId p) const { return tokens_.at(p.value).size(); }
  std::size_t total() const;

  void add(PlaceId p, Age age);
  /// Removes one token of exactly `age`; false when there is none.
  bool remove(PlaceId p, Age age);
  void resize(std::size_t places) { tokens_.resize(places); }

  /// Ages above `cap` become `cap`.
  void cap_ages(Age cap);
  /// Every age grows by `d`, saturating.
  void shift(std::uint64_t d);

  const std::vector<std::vector<Age>>& raw() const { return tokens_; }

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  std::vector<std::vector<Age>> tokens_;
};

/// A transition together with the age consumed on each of its input slots.
struct Binding {
  TransitionId transition;
  std::vector<Age> ages;

  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Every guard-satisfying binding, one per combination of distinct ages.
std::vector<Binding> enabled(const Tapn& net, const Marking& m);
bool is_enabled(const Tapn& net, const Marking& m, const Binding& binding);

/// Throws std::invalid_argument for a binding that is not enabled.
Marking fire(const Tapn& net, const Marking& m, const Binding& binding);

Marking delay(const Tapn& net, const Marking& m, std::uint64_t d);

/// Exact token counts per listed place; every other place must be empty.
/// Ages are ignored.
struct TargetSpec {
  std::vector<std::pair<PlaceId, std::uint32_t>> counts;

  bool matches(const Marking& m) const;
  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ReachOptions {
  std::size_t max_states = 1'000'000;
  /// Bound on elapsed time along explored runs; nullopt leaves time unbounded.
  std::optional<std::uint64_t> max_total_delay;
  /// Dead markings kept in the result.
  std::size_t max_frontier = 256;
};

enum class ReachVerdict { Reachable, Unreachable, BoundExceeded };

std::string_view to_string(ReachVerdict verdict);

struct TraceStep {
  std::uint64_t delay = 0;
  TransitionId transition;
  /// Ages as seen by the engine; ages above the net's largest constant are
  /// collapsed to that constant plus one.
  std::vector<Age> ages;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct ReachStats {
  std::size_t states = 0;
  std::size_t peak_frontier = 0;
  std::size_t dead_markings = 0;
};

struct ReachResult {
  ReachVerdict verdict = ReachVerdict::Unreachable;
  std::vector<TraceStep> trace;
  /// Dead markings (no transition can ever fire again) met during the search.
  std::vector<Marking> frontier;
  ReachStats stats;
};

class UnsupportedGuard : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Breadth-first search over delay-then-fire steps with token ages capped at
/// max_constant() + 1. Exhaustive for nets whose guards are closed or
/// unbounded; throws UnsupportedGuard for right-open finite guards.
ReachResult reachable(const Tapn& net, const Marking& m0, const TargetSpec& target,
                      const ReachOptions& opts = {});

/// reachable() on net.relaxed().
ReachResult untimed_reachable(const Tapn& net, const Marking& m0, const TargetSpec& target,
                              const ReachOptions& opts = {});

/// Re-executes a trace with exact ages through delay() and fire(). Returns the
/// final marking, or nullopt if some step is not enabled.
std::optional<Marking> replay(const Tapn& net, const Marking& m0, const std::vector<TraceStep>& trace);

}  // namespace virtint

template <typename Tag>
struct std::hash<virtint::Index<Tag>> {
  std::size_t operator()(const virtint::Index<Tag>& i) const noexcept { return std::hash<std::uint32_t>{}(i.value); }
};

#endif  // VIRTINT_TAPN_HPP

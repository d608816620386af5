// Virtual integration: bind instance lines to architecture components,
// synchronize compatible messages across translated test cases, and decide
// whether the merged net can reach its joint target.
#ifndef VIRTINT_INTEGRATE_HPP
#define VIRTINT_INTEGRATE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "virtint/model.hpp"
#include "virtint/parser.hpp"
#include "virtint/tapn.hpp"
#include "virtint/translate.hpp"

namespace virtint {

class BindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstanceMap {
 public:
  void bind(const std::string& tcsd, const InstanceId& instance, const ComponentId& component);

  /// Throws BindingError for an unbound line.
  const ComponentId& component(const std::string& tcsd, const InstanceId& instance) const;
  bool contains(const std::string& tcsd, const InstanceId& instance) const;

  /// Lines of two diagrams that stand for the same component.
  bool related(const std::string& tcsd1, const InstanceId& i1, const std::string& tcsd2,
               const InstanceId& i2) const;

  const std::map<std::pair<std::string, InstanceId>, ComponentId>& relation() const { return relation_; }

 private:
  std::map<std::pair<std::string, InstanceId>, ComponentId> relation_;
};

/// Maps every instance line of every diagram through its binding. Each
/// diagram needs a binding, every test line must be bound, no test line may
/// stand for the diagram's own SUT component, and no two diagrams may test the
/// same component.
InstanceMap bind_instances(const Architecture& arch, const std::vector<const Tcsd*>& tcsds);

struct MessageOccurrence {
  std::string tcsd;
  MessageInfo message;
};

/// Same sender component, byte-equal label, same receiver component. Throws
/// std::invalid_argument for two occurrences of one diagram and BindingError
/// for unbound lines.
bool compatible(const MessageOccurrence& m1, const MessageOccurrence& m2, const InstanceMap& map);

/// Synchronized transition pairs; each pair is ordered by unit position.
struct SyncMatching {
  std::vector<std::pair<SourceRef, SourceRef>> pairs;

  friend bool operator==(const SyncMatching&, const SyncMatching&) = default;
};

enum class MatchPolicy { Maximal, Strict };

std::string_view to_string(MatchPolicy policy);

class UnmatchedMessages : public std::runtime_error {
 public:
  UnmatchedMessages(std::string message, std::vector<std::string> occurrences)
      : std::runtime_error(std::move(message)), occurrences_(std::move(occurrences)) {}

  const std::vector<std::string>& occurrences() const { return occurrences_; }

 private:
  std::vector<std::string> occurrences_;
};

struct MatchingSet {
  std::vector<SyncMatching> matchings;
  /// Number of matchings before the cap, saturating.
  std::size_t total = 0;
  bool truncated = false;
};

/// Per unit pair and per class of mutually compatible occurrences, every
/// maximum-cardinality injective pairing; the classes are combined by
/// cartesian product in lexicographic order. Strict policy throws
/// UnmatchedMessages when some class has unequal multiplicities.
MatchingSet enumerate_matchings(const std::vector<TranslationUnit>& units, const InstanceMap& map,
                                MatchPolicy policy, std::size_t max_matchings);

/// Disjoint union with element names prefixed by their unit name; every
/// matched pair is fused into one transition that inherits all arcs of both.
/// Throws std::invalid_argument for pairs naming unknown, silent or already
/// matched transitions.
TranslationUnit merge(const std::vector<TranslationUnit>& units, const SyncMatching& matching);

enum class Status { Consistent, OrderingDeadlock, TimingConflict, BoundExceeded };
enum class Overall { Consistent, Inconsistent, Inconclusive };

std::string_view to_string(Status status);
std::string_view to_string(Overall overall);

struct WitnessStep {
  std::uint64_t delay = 0;
  std::string transition;
  std::optional<std::string> label;

  friend bool operator==(const WitnessStep&, const WitnessStep&) = default;
};

struct MatchedPair {
  std::string first;
  std::string second;
  std::string label;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Verdict {
  Status status = Status::BoundExceeded;
  SyncMatching matching;
  /// `matching` spelled with unit-qualified transition names.
  std::vector<MatchedPair> pairs;
  /// Engine trace on the merged net (consistent only).
  std::vector<TraceStep> trace;
  std::vector<WitnessStep> witness;
  /// Sorted, distinct labels of the blocking transitions (deadlocks only).
  std::vector<std::string> blocking;
  std::vector<std::string> blocking_transitions;
  ReachVerdict timed = ReachVerdict::BoundExceeded;
  std::optional<ReachVerdict> untimed;
  ReachStats stats;
  std::uint64_t delay_bound = 0;
};

struct CheckOptions {
  MatchPolicy policy = MatchPolicy::Maximal;
  bool require_all = false;
  std::size_t max_states = 1'000'000;
  /// nullopt selects default_max_total_delay() of each merged net.
  std::optional<std::uint64_t> max_total_delay;
  std::size_t max_matchings = 64;
};

/// (largest constant + 1) * (transition count + 1).
std::uint64_t default_max_total_delay(const Tapn& net);

struct AnalysisReport {
  std::vector<std::string> units;
  std::vector<Verdict> verdicts;
  Overall overall = Overall::Inconclusive;
  std::size_t total_matchings = 0;
  bool truncated = false;
  CheckOptions options;
};

/// Labeled transitions with a marked input place in some of the dead
/// markings and enabled in none of them.
std::vector<TransitionId> blocking_transitions(const Tapn& net, const std::vector<Marking>& dead);

Verdict analyze(const std::vector<TranslationUnit>& units, const SyncMatching& matching, const CheckOptions& opts);

/// At least one matching must be consistent (every matching with
/// require_all). Unfinished analyses and truncated enumerations that leave the
/// answer open give Overall::Inconclusive.
AnalysisReport check_consistency(const std::vector<TranslationUnit>& units, const InstanceMap& map,
                                 const CheckOptions& opts = {});

}  // namespace virtint

#endif  // VIRTINT_INTEGRATE_HPP

// Compilation of a validated TCSD into a marked timed-arc Petri net.
#ifndef VIRTINT_TRANSLATE_HPP
#define VIRTINT_TRANSLATE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "virtint/model.hpp"
#include "virtint/tapn.hpp"

namespace virtint {

/// Which construction step produced a transition.
enum class Rule {
  Start,
  Message,
  Partition,
  FragmentStart,
  FragmentEnd,
  TimeoutStart,
  TimeoutEnd,
  Merged,
};

std::string_view to_string(Rule rule);

/// Instance lines and label of the message behind a labeled transition.
struct MessageInfo {
  InstanceId sender;
  InstanceId receiver;
  std::string label;

  friend bool operator==(const MessageInfo&, const MessageInfo&) = default;
};

/// A transition of an input unit, before merging.
struct SourceRef {
  std::string unit;
  TransitionId transition;

  friend auto operator<=>(const SourceRef&, const SourceRef&) = default;
};

struct TransitionInfo {
  Rule rule = Rule::Start;
  /// SUT event the transition stands for; empty for t_start.
  EventId event;
  std::optional<MessageInfo> message;
  /// Unit-local transitions this one replaces (itself for a solo unit).
  std::vector<SourceRef> sources;
  /// Number of enclosing fragment branches.
  std::size_t depth = 0;

  friend bool operator==(const TransitionInfo&, const TransitionInfo&) = default;
};

struct TranslationUnit {
  std::string name;
  /// SUT instance line; empty for merged units.
  InstanceId sut;
  Tapn net;
  Marking m0;
  TargetSpec target;
  /// Transitions per SUT event. Events inside loop bodies map to one
  /// transition per unrolling; strict borders map to none.
  std::map<EventId, std::vector<TransitionId>> event_map;
  /// Parallel to net.transitions().
  std::vector<TransitionInfo> info;

  /// Message label of `t`, nullopt for silent transitions.
  const std::optional<std::string>& label(TransitionId t) const { return net.transition(t).label; }
};

class TranslateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws TranslateError for inputs outside the supported construction:
/// timeouts anchored on fragment borders and timeouts that overlap without
/// nesting.
TranslationUnit translate(const ValidatedTcsd& tcsd);

struct StructuralReport {
  std::map<Rule, std::size_t> transitions_per_rule;
  std::size_t labeled = 0;
  std::size_t silent = 0;
  /// Transitions whose main-sequence guard is [d,d].
  std::size_t point_guarded = 0;
  /// Branch entry arcs per fragment-start transition, by transition name.
  std::map<std::string, std::size_t> branches;
  std::size_t branch_depth = 0;
  Age max_constant = 0;
};

StructuralReport structural_report(const TranslationUnit& tu);

}  // namespace virtint

#endif  // VIRTINT_TRANSLATE_HPP

// Sequence diagrams and timed test-case sequence diagrams (TCSDs).
//
// A Tcsd is plain data. `validate` checks the well-formedness clauses and,
// on success, hands back a ValidatedTcsd: the normalized diagram (implicit
// zero partition inserted, partitions sorted) together with its SUT walk.
#ifndef VIRTINT_MODEL_HPP
#define VIRTINT_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace virtint {

using EventId = std::string;
using InstanceId = std::string;
using FragmentId = std::string;

/// Abstract time in integer ticks.
using Ticks = std::uint32_t;

enum class EventKind {
  Send,
  Receive,
  FragmentEnter,
  FragmentExit,
  Partition,
  TimeoutStart,
  TimeoutEnd,
};

std::string_view to_string(EventKind kind);

struct Event {
  EventId id;
  InstanceId instance;
  EventKind kind = EventKind::Send;
  /// Owning fragment for FragmentEnter/FragmentExit, empty otherwise.
  FragmentId fragment;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Message {
  EventId send;
  std::string label;
  EventId receive;

  friend bool operator==(const Message&, const Message&) = default;
};

enum class Operator { Strict, Par, Opt, Alt, Loop };

std::string_view to_string(Operator op);

struct Operand {
  /// Events inside the operand, including the borders of nested fragments.
  std::set<EventId> events;
  /// Directly nested fragments.
  std::vector<FragmentId> children;

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Fragment {
  FragmentId id;
  Operator op = Operator::Strict;
  std::vector<Operand> operands;
  /// Constant iteration count; present iff op == Loop.
  std::optional<std::uint32_t> loop_bound;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct SequenceDiagram {
  std::string name;
  std::vector<InstanceId> instances;
  std::vector<Event> events;
  /// Per-lifeline event order; every event appears on its own lifeline once.
  std::map<InstanceId, std::vector<EventId>> lifelines;
  std::vector<Message> messages;
  std::vector<Fragment> fragments;

  const Event* find_event(const EventId& id) const;
  const Fragment* find_fragment(const FragmentId& id) const;

  friend bool operator==(const SequenceDiagram&, const SequenceDiagram&) = default;
};

struct PartitionLine {
  /// One partition event per instance line.
  std::vector<EventId> events;
  Ticks timestamp = 0;

  friend bool operator==(const PartitionLine&, const PartitionLine&) = default;
};

struct Timeout {
  EventId start;
  EventId end;
  Ticks bound = 0;

  friend bool operator==(const Timeout&, const Timeout&) = default;
};

struct Tcsd {
  SequenceDiagram base;
  InstanceId sut;
  std::vector<PartitionLine> partitions;
  std::vector<Timeout> timeouts;

  const std::string& name() const { return base.name; }

  friend bool operator==(const Tcsd&, const Tcsd&) = default;
};

/// Well-formedness clause a violation refers to.
enum class Clause {
  Malformed,
  MessageEndpoints,
  OperandCount,
  LoopBound,
  NoSelfNesting,
  NoSharedEvents,
  Containment,
  FragmentBounds,
  SutEndpoint,
  PartitionUniqueness,
  PartitionCompleteness,
  PartitionOrdering,
  NoFragmentCutting,
  TimeoutOrdered,
  TimeoutSameFragment,
  TimeoutSpansPartition,
};

std::string_view to_string(Clause clause);

struct Violation {
  Clause clause = Clause::Malformed;
  /// Offending element ids (events, fragments, instances or "message#k").
  std::vector<std::string> elements;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Cursor over the SUT lifeline. Operands of a fragment are visited one after
/// the other in declared order; nested fragments are visited completely before
/// the remaining events of the enclosing operand.
class SutWalk {
 public:
  struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    bool empty() const { return begin == end; }
  };

  struct FragmentSpan {
    std::size_t enter = 0;
    std::size_t exit = 0;
    std::vector<Range> operands;
  };

  const std::vector<EventId>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  const EventId& at(std::size_t index) const { return order_.at(index); }

  std::optional<std::size_t> position(const EventId& event) const;
  /// Immediately following SUT event; nullopt at the last one.
  std::optional<EventId> next(const EventId& event) const;
  std::optional<EventId> first(const FragmentId& fragment, std::size_t operand) const;
  std::optional<EventId> last(const FragmentId& fragment, std::size_t operand) const;

  /// Fragments present on the SUT lifeline.
  const std::map<FragmentId, FragmentSpan>& spans() const { return spans_; }
  const FragmentSpan* span(const FragmentId& fragment) const;

 private:
  friend SutWalk build_sut_walk(const Tcsd& tcsd);

  std::vector<EventId> order_;
  std::map<EventId, std::size_t> index_;
  std::map<FragmentId, FragmentSpan> spans_;
};

/// A Tcsd that passed validation. Immutable.
class ValidatedTcsd {
 public:
  const Tcsd& tcsd() const { return tcsd_; }
  const SutWalk& walk() const { return walk_; }
  const std::string& name() const { return tcsd_.name(); }

 private:
  friend class Validator;
  ValidatedTcsd(Tcsd tcsd, SutWalk walk) : tcsd_(std::move(tcsd)), walk_(std::move(walk)) {}

  Tcsd tcsd_;
  SutWalk walk_;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::optional<ValidatedTcsd> validated;

  bool ok() const { return violations.empty(); }
};

/// Checks every clause; malformed references are reported on their own, before
/// (and instead of) the semantic clauses.
ValidationResult validate(const Tcsd& raw);

/// Requires a validated diagram.
SutWalk sut_walk(const ValidatedTcsd& tcsd);

/// Prefix used for events of the implicit zero partition line.
inline constexpr std::string_view kImplicitPartitionPrefix = "tau0.";

}  // namespace virtint

#endif  // VIRTINT_MODEL_HPP

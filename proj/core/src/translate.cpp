#include "virtint/translate.hpp"

#include <algorithm>

namespace virtint {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Start: return "start";
    case Rule::Message: return "message";
    case Rule::Partition: return "partition";
    case Rule::FragmentStart: return "fragment-start";
    case Rule::FragmentEnd: return "fragment-end";
    case Rule::TimeoutStart: return "timeout-start";
    case Rule::TimeoutEnd: return "timeout-end";
    case Rule::Merged: return "merged";
  }
  return "?";
}

namespace {

class Translator {
 public:
  explicit Translator(const ValidatedTcsd& v) : tcsd_(v.tcsd()), walk_(v.walk()) {
    const auto& base = tcsd_.base;
    for (const auto& m : base.messages) {
      const Event* s = base.find_event(m.send);
      const Event* r = base.find_event(m.receive);
      MessageInfo info{s->instance, r->instance, m.label};
      messages_.emplace(m.send, info);
      messages_.emplace(m.receive, info);
    }
    for (const auto& line : tcsd_.partitions) {
      for (const auto& e : line.events) deltas_.emplace(e, line.timestamp);
    }
    for (std::size_t k = 0; k < tcsd_.timeouts.size(); ++k) {
      starts_[tcsd_.timeouts[k].start].push_back(k);
      ends_[tcsd_.timeouts[k].end].push_back(k);
    }
  }

  TranslationUnit run() {
    tu_.name = tcsd_.name();
    tu_.sut = tcsd_.sut;

    const PlaceId pre = tu_.net.add_place("pre");
    const TransitionId start = add_transition(std::nullopt, Rule::Start, {});
    const PlaceId p0 = place();
    tu_.net.add_input_arc(pre, start, Guard::any());
    tu_.net.add_output_arc(start, p0);

    Scope scope;
    const PlaceId end = build({0, walk_.size()}, p0, scope);
    close_scope(scope);

    tu_.m0 = Marking(tu_.net.place_count());
    tu_.m0.add(pre, 0);
    tu_.target.counts = {{end, 1}};
    return std::move(tu_);
  }

 private:
  struct Scope {
    // Open timeouts, innermost last, with their waiting places.
    std::vector<std::pair<std::size_t, PlaceId>> open;
    bool branch = false;
    std::size_t depth = 0;
  };

  PlaceId place() { return tu_.net.add_place("P" + std::to_string(places_++)); }

  TransitionId add_transition(std::optional<std::string> label, Rule rule, const EventId& event,
                              std::size_t depth = 0) {
    const TransitionId t = tu_.net.add_transition("T" + std::to_string(transitions_++), label);
    TransitionInfo info;
    info.rule = rule;
    info.event = event;
    if (rule == Rule::Message) info.message = messages_.at(event);
    info.sources = {SourceRef{tu_.name, t}};
    info.depth = depth;
    tu_.info.push_back(std::move(info));
    if (!event.empty()) tu_.event_map[event].push_back(t);
    return t;
  }

  // Main-sequence step: p -> transport(guard) -> t -> p'.
  std::pair<TransitionId, PlaceId> step(PlaceId from, Guard guard, std::optional<std::string> label, Rule rule,
                                        const EventId& event, const Scope& scope) {
    const TransitionId t = add_transition(std::move(label), rule, event, scope.depth);
    const PlaceId to = place();
    tu_.net.add_transport_arc(from, t, to, guard);
    return {t, to};
  }

  bool anchors(const EventId& e) const { return starts_.count(e) > 0 || ends_.count(e) > 0; }

  void attach_timeouts(const EventId& e, TransitionId t, Scope& scope) {
    if (auto it = ends_.find(e); it != ends_.end()) {
      const auto& closing = it->second;
      if (closing.size() > scope.open.size()) throw std::logic_error("translate: timeout end outside its scope");
      for (std::size_t k = 0; k < closing.size(); ++k) {
        const auto& [index, wait] = scope.open[scope.open.size() - 1 - k];
        if (std::find(closing.begin(), closing.end(), index) == closing.end()) {
          throw TranslateError("translate: timeouts ending at " + e + " overlap without nesting");
        }
        tu_.net.add_input_arc(wait, t, Guard::closed(0, tcsd_.timeouts[index].bound));
      }
      scope.open.resize(scope.open.size() - closing.size());
    }
    if (auto it = starts_.find(e); it != starts_.end()) {
      // Timeouts that end later open first so inner ones close first.
      std::vector<std::size_t> opening = it->second;
      std::stable_sort(opening.begin(), opening.end(), [&](std::size_t a, std::size_t b) {
        return *walk_.position(tcsd_.timeouts[a].end) > *walk_.position(tcsd_.timeouts[b].end);
      });
      for (std::size_t index : opening) {
        const PlaceId wait = tu_.net.add_place("W" + std::to_string(waits_++));
        tu_.net.add_output_arc(t, wait);
        scope.open.emplace_back(index, wait);
      }
    }
  }

  void close_scope(const Scope& scope) const {
    if (!scope.open.empty()) {
      throw TranslateError("translate: timeout starting at " + tcsd_.timeouts[scope.open.back().first].start +
                           " does not end inside the same operand");
    }
  }

  PlaceId build(SutWalk::Range range, PlaceId current, Scope& scope) {
    std::size_t i = range.begin;
    while (i < range.end) {
      const EventId& id = walk_.at(i);
      const Event& ev = *tcsd_.base.find_event(id);
      switch (ev.kind) {
        case EventKind::Send:
        case EventKind::Receive: {
          auto [t, next] = step(current, Guard::any(), messages_.at(id).label, Rule::Message, id, scope);
          attach_timeouts(id, t, scope);
          current = next;
          ++i;
          break;
        }
        case EventKind::Partition: {
          if (scope.branch) throw std::logic_error("translate: partition line inside a fragment branch");
          auto [t, next] = step(current, Guard::exactly(deltas_.at(id)), std::nullopt, Rule::Partition, id, scope);
          attach_timeouts(id, t, scope);
          current = next;
          ++i;
          break;
        }
        case EventKind::TimeoutStart:
        case EventKind::TimeoutEnd: {
          const Rule rule = ev.kind == EventKind::TimeoutStart ? Rule::TimeoutStart : Rule::TimeoutEnd;
          auto [t, next] = step(current, Guard::any(), std::nullopt, rule, id, scope);
          attach_timeouts(id, t, scope);
          current = next;
          ++i;
          break;
        }
        case EventKind::FragmentEnter: {
          const Fragment& f = *tcsd_.base.find_fragment(ev.fragment);
          const SutWalk::FragmentSpan& span = *walk_.span(f.id);
          const EventId& exit_id = walk_.at(span.exit);
          if (anchors(id) || anchors(exit_id)) {
            throw TranslateError("translate: timeout anchored on a border of fragment " + f.id);
          }
          current = fragment(f, span, id, exit_id, current, scope);
          i = span.exit + 1;
          break;
        }
        case EventKind::FragmentExit:
          throw std::logic_error("translate: unexpected fragment exit " + id);
      }
    }
    return current;
  }

  PlaceId fragment(const Fragment& f, const SutWalk::FragmentSpan& span, const EventId& enter,
                   const EventId& exit, PlaceId current, Scope& scope) {
    if (f.op == Operator::Strict) {
      for (const auto& operand : span.operands) {
        Scope inner{{}, scope.branch, scope.depth};
        current = build(operand, current, inner);
        close_scope(inner);
      }
      return current;
    }

    auto [t_start, p_start] = step(current, Guard::any(), std::nullopt, Rule::FragmentStart, enter, scope);
    std::vector<PlaceId> branch_ends;
    auto branch = [&](const std::vector<SutWalk::Range>& bodies) {
      const PlaceId p_op = place();
      tu_.net.add_output_arc(t_start, p_op);
      PlaceId at = p_op;
      for (const auto& body : bodies) {
        Scope inner{{}, true, scope.depth + 1};
        at = build(body, at, inner);
        close_scope(inner);
      }
      branch_ends.push_back(at);
    };

    if (f.op == Operator::Loop) {
      if (!f.loop_bound) throw TranslateError("translate: loop " + f.id + " has no constant bound");
      const SutWalk::Range body = span.operands.empty() ? SutWalk::Range{} : span.operands.front();
      branch(std::vector<SutWalk::Range>(*f.loop_bound, body));
    } else {
      for (const auto& operand : span.operands) branch({operand});
    }

    const TransitionId t_end = add_transition(std::nullopt, Rule::FragmentEnd, exit, scope.depth);
    for (PlaceId p : branch_ends) tu_.net.add_input_arc(p, t_end, Guard::any());
    const PlaceId p_end = place();
    tu_.net.add_transport_arc(p_start, t_end, p_end, Guard::any());
    return p_end;
  }

  const Tcsd& tcsd_;
  const SutWalk& walk_;
  std::map<EventId, MessageInfo> messages_;
  std::map<EventId, Ticks> deltas_;
  std::map<EventId, std::vector<std::size_t>> starts_;
  std::map<EventId, std::vector<std::size_t>> ends_;

  TranslationUnit tu_;
  std::size_t places_ = 0;
  std::size_t transitions_ = 0;
  std::size_t waits_ = 0;
};

}  // namespace

TranslationUnit translate(const ValidatedTcsd& tcsd) { return Translator(tcsd).run(); }

StructuralReport structural_report(const TranslationUnit& tu) {
  StructuralReport r;
  const auto& net = tu.net;
  for (std::uint32_t k = 0; k < net.transition_count(); ++k) {
    const TransitionId t{k};
    const TransitionInfo& info = tu.info.at(k);
    ++r.transitions_per_rule[info.rule];
    if (net.transition(t).label) {
      ++r.labeled;
    } else {
      ++r.silent;
    }
    if (info.rule == Rule::FragmentStart) {
      std::size_t n = 0;
      for (const auto& arc : net.output_arcs()) n += arc.transition == t ? 1 : 0;
      r.branches[net.transition(t).name] = n;
      r.branch_depth = std::max(r.branch_depth, info.depth + 1);
    }
  }
  for (const auto& arc : net.transport_arcs()) {
    if (arc.guard.upper && arc.guard.upper_closed && *arc.guard.upper == arc.guard.lower) ++r.point_guarded;
  }
  r.max_constant = net.max_constant();
  return r;
}

}  // namespace virtint

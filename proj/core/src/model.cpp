#include "virtint/model.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <utility>

namespace virtint {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Send: return "send";
    case EventKind::Receive: return "receive";
    case EventKind::FragmentEnter: return "fragment-enter";
    case EventKind::FragmentExit: return "fragment-exit";
    case EventKind::Partition: return "partition";
    case EventKind::TimeoutStart: return "timeout-start";
    case EventKind::TimeoutEnd: return "timeout-end";
  }
  return "?";
}

std::string_view to_string(Operator op) {
  switch (op) {
    case Operator::Strict: return "strict";
    case Operator::Par: return "par";
    case Operator::Opt: return "opt";
    case Operator::Alt: return "alt";
    case Operator::Loop: return "loop";
  }
  return "?";
}

std::string_view to_string(Clause clause) {
  switch (clause) {
    case Clause::Malformed: return "malformed";
    case Clause::MessageEndpoints: return "message endpoints";
    case Clause::OperandCount: return "operand count";
    case Clause::LoopBound: return "loop bound";
    case Clause::NoSelfNesting: return "no self-nesting";
    case Clause::NoSharedEvents: return "no shared events";
    case Clause::Containment: return "containment";
    case Clause::FragmentBounds: return "fragment bounds";
    case Clause::SutEndpoint: return "sut endpoint";
    case Clause::PartitionUniqueness: return "partition uniqueness";
    case Clause::PartitionCompleteness: return "partition completeness";
    case Clause::PartitionOrdering: return "partition ordering";
    case Clause::NoFragmentCutting: return "no fragment cutting";
    case Clause::TimeoutOrdered: return "timeout ordered";
    case Clause::TimeoutSameFragment: return "timeout same fragment";
    case Clause::TimeoutSpansPartition: return "timeout spans partition";
  }
  return "?";
}

const Event* SequenceDiagram::find_event(const EventId& id) const {
  auto it = std::find_if(events.begin(), events.end(), [&](const Event& e) { return e.id == id; });
  return it == events.end() ? nullptr : &*it;
}

const Fragment* SequenceDiagram::find_fragment(const FragmentId& id) const {
  auto it = std::find_if(fragments.begin(), fragments.end(),
                         [&](const Fragment& f) { return f.id == id; });
  return it == fragments.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// SutWalk

std::optional<std::size_t> SutWalk::position(const EventId& event) const {
  auto it = index_.find(event);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EventId> SutWalk::next(const EventId& event) const {
  auto pos = position(event);
  if (!pos || *pos + 1 >= order_.size()) return std::nullopt;
  return order_[*pos + 1];
}

const SutWalk::FragmentSpan* SutWalk::span(const FragmentId& fragment) const {
  auto it = spans_.find(fragment);
  return it == spans_.end() ? nullptr : &it->second;
}

std::optional<EventId> SutWalk::first(const FragmentId& fragment, std::size_t operand) const {
  const auto* s = span(fragment);
  if (s == nullptr || operand >= s->operands.size() || s->operands[operand].empty()) {
    return std::nullopt;
  }
  return order_[s->operands[operand].begin];
}

std::optional<EventId> SutWalk::last(const FragmentId& fragment, std::size_t operand) const {
  const auto* s = span(fragment);
  if (s == nullptr || operand >= s->operands.size() || s->operands[operand].empty()) {
    return std::nullopt;
  }
  return order_[s->operands[operand].end - 1];
}

SutWalk build_sut_walk(const Tcsd& tcsd) {
  const auto& diagram = tcsd.base;
  SutWalk walk;

  std::map<EventId, const Event*> events;
  for (const auto& e : diagram.events) events[e.id] = &e;

  std::function<void(const std::vector<EventId>&)> visit = [&](const std::vector<EventId>& seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const Event& ev = *events.at(seq[i]);
      if (ev.kind != EventKind::FragmentEnter) {
        walk.index_[ev.id] = walk.order_.size();
        walk.order_.push_back(ev.id);
        continue;
      }
      const Fragment* fragment = diagram.find_fragment(ev.fragment);
      std::size_t j = i + 1;
      while (j < seq.size()) {
        const Event& cand = *events.at(seq[j]);
        if (cand.kind == EventKind::FragmentExit && cand.fragment == ev.fragment) break;
        ++j;
      }
      if (j == seq.size() || fragment == nullptr) {
        throw std::logic_error("sut walk: unbalanced fragment " + ev.fragment);
      }

      SutWalk::FragmentSpan span;
      span.enter = walk.order_.size();
      walk.index_[ev.id] = walk.order_.size();
      walk.order_.push_back(ev.id);
      for (const auto& operand : fragment->operands) {
        std::vector<EventId> inner;
        for (std::size_t k = i + 1; k < j; ++k) {
          if (operand.events.count(seq[k]) != 0) inner.push_back(seq[k]);
        }
        SutWalk::Range range;
        range.begin = walk.order_.size();
        visit(inner);
        range.end = walk.order_.size();
        span.operands.push_back(range);
      }
      span.exit = walk.order_.size();
      walk.index_[seq[j]] = walk.order_.size();
      walk.order_.push_back(seq[j]);
      walk.spans_[ev.fragment] = std::move(span);
      i = j;
    }
  };

  auto it = diagram.lifelines.find(tcsd.sut);
  if (it != diagram.lifelines.end()) visit(it->second);
  return walk;
}

SutWalk sut_walk(const ValidatedTcsd& tcsd) { return tcsd.walk(); }

// ---------------------------------------------------------------------------
// Validator

class Validator {
 public:
  explicit Validator(const Tcsd& tcsd) : tcsd_(tcsd), d_(tcsd.base) {}

  ValidationResult run() {
    check_malformed();
    if (violations_.empty()) {
      check_messages();
      check_fragments();
      check_partitions();
      check_timeouts();
    }
    ValidationResult result;
    result.violations = std::move(violations_);
    if (result.ok()) {
      Tcsd normalized = normalize();
      SutWalk walk = build_sut_walk(normalized);
      result.validated.emplace(ValidatedTcsd(std::move(normalized), std::move(walk)));
    }
    return result;
  }

 private:
  struct Position {
    InstanceId instance;
    std::size_t index = 0;
  };

  void report(Clause clause, std::vector<std::string> elements, std::string detail) {
    violations_.push_back(Violation{clause, std::move(elements), std::move(detail)});
  }

  bool before(const EventId& a, const EventId& b) const {
    const auto& pa = positions_.at(a);
    const auto& pb = positions_.at(b);
    return pa.instance == pb.instance && pa.index < pb.index;
  }

  static bool is_border(EventKind kind) {
    return kind == EventKind::FragmentEnter || kind == EventKind::FragmentExit;
  }

  // -- structural references ------------------------------------------------

  void check_malformed() {
    std::set<InstanceId> instances;
    for (const auto& i : d_.instances) {
      if (!instances.insert(i).second) {
        report(Clause::Malformed, {i}, "duplicate instance line");
      }
    }
    if (instances.count(tcsd_.sut) == 0) {
      report(Clause::Malformed, {tcsd_.sut}, "sut is not an instance line");
    }

    for (const auto& e : d_.events) {
      if (!events_.emplace(e.id, &e).second) {
        report(Clause::Malformed, {e.id}, "duplicate event id");
      }
      if (instances.count(e.instance) == 0) {
        report(Clause::Malformed, {e.id, e.instance}, "event on unknown instance line");
      }
    }

    for (const auto& [instance, order] : d_.lifelines) {
      if (instances.count(instance) == 0) {
        report(Clause::Malformed, {instance}, "lifeline for unknown instance");
        continue;
      }
      for (std::size_t k = 0; k < order.size(); ++k) {
        auto it = events_.find(order[k]);
        if (it == events_.end()) {
          report(Clause::Malformed, {order[k]}, "lifeline lists unknown event");
          continue;
        }
        if (it->second->instance != instance) {
          report(Clause::Malformed, {order[k], instance}, "event listed on a foreign lifeline");
          continue;
        }
        if (!positions_.emplace(order[k], Position{instance, k}).second) {
          report(Clause::Malformed, {order[k]}, "event listed twice on its lifeline");
        }
      }
    }
    for (const auto& e : d_.events) {
      if (positions_.count(e.id) == 0 && events_.count(e.id) != 0 && instances.count(e.instance)) {
        report(Clause::Malformed, {e.id}, "event missing from its lifeline");
      }
    }

    std::map<EventId, int> endpoint_refs;
    for (std::size_t k = 0; k < d_.messages.size(); ++k) {
      const auto& m = d_.messages[k];
      const std::string name = "message#" + std::to_string(k);
      const Event* s = event(m.send);
      const Event* r = event(m.receive);
      if (s == nullptr || r == nullptr) {
        report(Clause::Malformed, {name}, "message endpoint references unknown event");
        continue;
      }
      if (s->kind != EventKind::Send || r->kind != EventKind::Receive) {
        report(Clause::Malformed, {name, m.send, m.receive},
               "message endpoints must be a send and a receive event");
      }
      ++endpoint_refs[m.send];
      ++endpoint_refs[m.receive];
    }
    for (const auto& e : d_.events) {
      if ((e.kind == EventKind::Send || e.kind == EventKind::Receive) &&
          endpoint_refs.count(e.id) == 0) {
        report(Clause::Malformed, {e.id}, "send/receive event is not part of a message");
      }
    }

    std::set<FragmentId> fragment_ids;
    for (const auto& f : d_.fragments) {
      if (!fragment_ids.insert(f.id).second) {
        report(Clause::Malformed, {f.id}, "duplicate fragment id");
      }
    }
    for (const auto& f : d_.fragments) {
      for (const auto& operand : f.operands) {
        for (const auto& e : operand.events) {
          if (event(e) == nullptr) report(Clause::Malformed, {f.id, e}, "operand lists unknown event");
        }
        for (const auto& c : operand.children) {
          if (fragment_ids.count(c) == 0) {
            report(Clause::Malformed, {f.id, c}, "operand lists unknown fragment");
          }
        }
      }
    }
    std::map<std::pair<FragmentId, InstanceId>, std::pair<int, int>> borders;
    for (const auto& e : d_.events) {
      if (e.kind != EventKind::FragmentEnter && e.kind != EventKind::FragmentExit) continue;
      if (fragment_ids.count(e.fragment) == 0) {
        report(Clause::Malformed, {e.id, e.fragment}, "border event of unknown fragment");
        continue;
      }
      auto& [enters, exits] = borders[{e.fragment, e.instance}];
      (e.kind == EventKind::FragmentEnter ? enters : exits) += 1;
    }
    for (const auto& [key, count] : borders) {
      if (count.first != 1 || count.second != 1) {
        report(Clause::Malformed, {key.first, key.second},
               "fragment needs exactly one enter and one exit event per spanned lifeline");
      }
    }

    std::map<EventId, int> partition_refs;
    for (std::size_t k = 0; k < tcsd_.partitions.size(); ++k) {
      for (const auto& e : tcsd_.partitions[k].events) {
        const Event* ev = event(e);
        if (ev == nullptr || ev->kind != EventKind::Partition) {
          report(Clause::Malformed, {"partition#" + std::to_string(k), e},
                 "partition line references a non-partition event");
          continue;
        }
        ++partition_refs[e];
      }
    }
    for (const auto& e : d_.events) {
      if (e.kind != EventKind::Partition) continue;
      auto it = partition_refs.find(e.id);
      if (it == partition_refs.end() || it->second != 1) {
        report(Clause::Malformed, {e.id}, "partition event must belong to exactly one partition line");
      }
    }

    for (std::size_t k = 0; k < tcsd_.timeouts.size(); ++k) {
      const auto& c = tcsd_.timeouts[k];
      const std::string name = "timeout#" + std::to_string(k);
      const Event* s = event(c.start);
      const Event* e = event(c.end);
      if (s == nullptr || e == nullptr) {
        report(Clause::Malformed, {name}, "timeout references unknown event");
        continue;
      }
      if (s->instance != tcsd_.sut || e->instance != tcsd_.sut) {
        report(Clause::Malformed, {name, c.start, c.end}, "timeout endpoints must lie on the sut lifeline");
      }
      if (c.bound == 0) report(Clause::Malformed, {name}, "timeout bound must be positive");
    }
  }

  const Event* event(const EventId& id) const {
    auto it = events_.find(id);
    return it == events_.end() ? nullptr : it->second;
  }

  // -- messages -------------------------------------------------------------

  void check_messages() {
    std::map<EventId, std::vector<std::size_t>> users;
    for (std::size_t k = 0; k < d_.messages.size(); ++k) {
      const auto& m = d_.messages[k];
      const std::string name = "message#" + std::to_string(k);
      users[m.send].push_back(k);
      users[m.receive].push_back(k);

      const auto& ps = positions_.at(m.send);
      const auto& pr = positions_.at(m.receive);
      if (ps.instance == pr.instance && !(ps.index < pr.index)) {
        report(Clause::MessageEndpoints, {name}, "send must precede receive on the same lifeline");
      }
      const bool send_sut = ps.instance == tcsd_.sut;
      const bool recv_sut = pr.instance == tcsd_.sut;
      if (send_sut == recv_sut) {
        report(Clause::SutEndpoint, {name, m.label},
               "message needs exactly one endpoint on the sut lifeline");
      }
    }
    for (const auto& [e, ks] : users) {
      if (ks.size() > 1) report(Clause::MessageEndpoints, {e}, "event shared by several messages");
    }
  }

  // -- fragments ------------------------------------------------------------

  std::set<FragmentId> descendants(const FragmentId& root) const {
    std::set<FragmentId> seen;
    std::vector<FragmentId> stack;
    auto push_children = [&](const FragmentId& id) {
      if (const Fragment* f = d_.find_fragment(id)) {
        for (const auto& op : f->operands) {
          for (const auto& c : op.children) stack.push_back(c);
        }
      }
    };
    push_children(root);
    while (!stack.empty()) {
      FragmentId id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      push_children(id);
    }
    return seen;
  }

  std::set<EventId> all_events(const Fragment& f) const {
    std::set<EventId> out;
    for (const auto& op : f.operands) out.insert(op.events.begin(), op.events.end());
    return out;
  }

  void check_fragments() {
    for (const auto& f : d_.fragments) {
      const std::size_t n = f.operands.size();
      switch (f.op) {
        case Operator::Strict:
        case Operator::Loop:
        case Operator::Opt:
          if (n != 1) report(Clause::OperandCount, {f.id}, std::string(to_string(f.op)) + " takes exactly one operand");
          break;
        case Operator::Par:
        case Operator::Alt:
          if (n < 2) report(Clause::OperandCount, {f.id}, std::string(to_string(f.op)) + " takes at least two operands");
          for (std::size_t k = 0; k < n; ++k) {
            if (f.operands[k].events.empty()) {
              report(Clause::OperandCount, {f.id, "operand#" + std::to_string(k)}, "empty operand");
            }
          }
          break;
      }
      if ((f.op == Operator::Loop) != f.loop_bound.has_value()) {
        report(Clause::LoopBound, {f.id}, "a constant bound is required on loops and only there");
      }
    }

    std::map<FragmentId, std::set<FragmentId>> below;
    for (const auto& f : d_.fragments) {
      below[f.id] = descendants(f.id);
      if (below[f.id].count(f.id) != 0) {
        report(Clause::NoSelfNesting, {f.id}, "fragment is nested inside itself");
      }
    }

    for (std::size_t a = 0; a < d_.fragments.size(); ++a) {
      const auto& f1 = d_.fragments[a];
      for (std::size_t x = 0; x < f1.operands.size(); ++x) {
        for (std::size_t y = x + 1; y < f1.operands.size(); ++y) {
          if (intersects(f1.operands[x].events, f1.operands[y].events)) {
            report(Clause::NoSharedEvents, {f1.id}, "operands of one fragment share events");
          }
        }
      }
      for (std::size_t b = a + 1; b < d_.fragments.size(); ++b) {
        const auto& f2 = d_.fragments[b];
        if (below[f1.id].count(f2.id) != 0 || below[f2.id].count(f1.id) != 0) continue;
        if (intersects(all_events(f1), all_events(f2))) {
          report(Clause::NoSharedEvents, {f1.id, f2.id}, "disjoint fragments share events");
        }
      }
    }

    for (const auto& parent : d_.fragments) {
      for (std::size_t x = 0; x < parent.operands.size(); ++x) {
        const auto& operand = parent.operands[x];
        std::set<FragmentId> nested;
        for (const auto& c : operand.children) {
          nested.insert(c);
          auto sub = descendants(c);
          nested.insert(sub.begin(), sub.end());
        }
        for (const auto& c : operand.children) {
          const Fragment* child = d_.find_fragment(c);
          bool ok = true;
          for (const auto& e : all_events(*child)) ok = ok && operand.events.count(e) != 0;
          for (const auto& e : d_.events) {
            if ((e.kind == EventKind::FragmentEnter || e.kind == EventKind::FragmentExit) &&
                e.fragment == c) {
              ok = ok && operand.events.count(e.id) != 0;
            }
          }
          if (!ok) {
            report(Clause::Containment, {parent.id, c},
                   "parent operand must contain every event of its nested fragment");
          }
        }
        for (const auto& e : operand.events) {
          const Event* ev = event(e);
          if ((ev->kind == EventKind::FragmentEnter || ev->kind == EventKind::FragmentExit) &&
              nested.count(ev->fragment) == 0) {
            report(Clause::Containment, {parent.id, ev->fragment, e},
                   "operand holds a border of a fragment it does not nest");
          }
        }
      }
    }

    check_fragment_bounds();
  }

  void check_fragment_bounds() {
    for (const auto& f : d_.fragments) {
      std::map<InstanceId, std::pair<std::size_t, std::size_t>> span;
      for (const auto& e : d_.events) {
        if (e.fragment != f.id || !is_border(e.kind)) continue;
        auto& s = span[e.instance];
        (e.kind == EventKind::FragmentEnter ? s.first : s.second) = positions_.at(e.id).index;
      }
      std::set<EventId> inside = all_events(f);
      bool ok = true;
      for (const auto& [instance, s] : span) {
        if (s.first >= s.second) {
          ok = false;
          continue;
        }
        const auto& order = d_.lifelines.at(instance);
        for (std::size_t k = s.first + 1; k < s.second; ++k) {
          // partition events inside a fragment are reported as cutting
          if (event(order[k])->kind == EventKind::Partition) continue;
          ok = ok && inside.count(order[k]) != 0;
        }
      }
      for (const auto& e : inside) {
        const auto& p = positions_.at(e);
        auto it = span.find(p.instance);
        ok = ok && it != span.end() && it->second.first < p.index && p.index < it->second.second;
      }
      if (!ok) {
        report(Clause::FragmentBounds, {f.id},
               "events between a fragment's borders must belong to its operands and vice versa");
      }
    }
  }

  static bool intersects(const std::set<EventId>& a, const std::set<EventId>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        return true;
      }
    }
    return false;
  }

  // -- partitions -----------------------------------------------------------

  void check_partitions() {
    const auto& lines = tcsd_.partitions;
    std::map<Ticks, std::vector<std::size_t>> by_time;
    for (std::size_t k = 0; k < lines.size(); ++k) by_time[lines[k].timestamp].push_back(k);
    for (const auto& [delta, ks] : by_time) {
      if (ks.size() > 1) {
        std::vector<std::string> names;
        for (auto k : ks) names.push_back("partition#" + std::to_string(k));
        report(Clause::PartitionUniqueness, names,
               "several partition lines at time " + std::to_string(delta));
      }
    }

    for (std::size_t k = 0; k < lines.size(); ++k) {
      std::set<InstanceId> covered;
      bool ok = lines[k].events.size() == d_.instances.size();
      for (const auto& e : lines[k].events) ok = covered.insert(event(e)->instance).second && ok;
      if (!ok || covered.size() != d_.instances.size()) {
        report(Clause::PartitionCompleteness, {"partition#" + std::to_string(k)},
               "partition line needs exactly one event on every instance line");
      }
    }

    for (std::size_t a = 0; a < lines.size(); ++a) {
      for (std::size_t b = 0; b < lines.size(); ++b) {
        if (!(lines[a].timestamp < lines[b].timestamp)) continue;
        bool ok = true;
        for (const auto& ea : lines[a].events) {
          for (const auto& eb : lines[b].events) {
            if (positions_.at(ea).instance == positions_.at(eb).instance) ok = ok && before(ea, eb);
          }
        }
        if (!ok) {
          report(Clause::PartitionOrdering,
                 {"partition#" + std::to_string(a), "partition#" + std::to_string(b)},
                 "earlier partition line must precede the later one on every lifeline");
        }
      }
    }

    for (std::size_t k = 0; k < lines.size(); ++k) {
      std::vector<std::string> cut;
      for (const auto& f : d_.fragments) {
        bool hit = false;
        for (const auto& e : lines[k].events) {
          for (const auto& op : f.operands) hit = hit || op.events.count(e) != 0;
          const auto& p = positions_.at(e);
          std::optional<std::size_t> enter, exit;
          for (const auto& ev : d_.events) {
            if (ev.fragment != f.id || ev.instance != p.instance || !is_border(ev.kind)) continue;
            (ev.kind == EventKind::FragmentEnter ? enter : exit) = positions_.at(ev.id).index;
          }
          hit = hit || (enter && exit && *enter < p.index && p.index < *exit);
        }
        if (hit) cut.push_back(f.id);
      }
      if (!cut.empty()) {
        cut.insert(cut.begin(), "partition#" + std::to_string(k));
        report(Clause::NoFragmentCutting, cut, "partition line cuts through a fragment");
      }
    }
  }

  // -- timeouts -------------------------------------------------------------

  void check_timeouts() {
    for (std::size_t k = 0; k < tcsd_.timeouts.size(); ++k) {
      const auto& c = tcsd_.timeouts[k];
      const std::string name = "timeout#" + std::to_string(k);
      if (!before(c.start, c.end)) {
        report(Clause::TimeoutOrdered, {name, c.start, c.end}, "timeout start must precede its end");
      }
      bool same = true;
      for (const auto& f : d_.fragments) {
        for (const auto& op : f.operands) {
          same = same && (op.events.count(c.start) != 0) == (op.events.count(c.end) != 0);
        }
      }
      if (!same) {
        report(Clause::TimeoutSameFragment, {name, c.start, c.end},
               "timeout endpoints must share every fragment operand");
      }
      const auto& order = d_.lifelines.at(tcsd_.sut);
      const std::size_t lo = std::min(positions_.at(c.start).index, positions_.at(c.end).index);
      const std::size_t hi = std::max(positions_.at(c.start).index, positions_.at(c.end).index);
      for (std::size_t p = lo + 1; p < hi; ++p) {
        if (event(order[p])->kind == EventKind::Partition) {
          report(Clause::TimeoutSpansPartition, {name, order[p]}, "timeout spans a partition line");
          break;
        }
      }
    }
  }

  // -- normalization --------------------------------------------------------

  Tcsd normalize() const {
    Tcsd out = tcsd_;
    std::stable_sort(out.partitions.begin(), out.partitions.end(),
                     [](const PartitionLine& a, const PartitionLine& b) { return a.timestamp < b.timestamp; });
    if (!out.partitions.empty() && out.partitions.front().timestamp == 0) return out;

    PartitionLine zero;
    zero.timestamp = 0;
    for (const auto& instance : out.base.instances) {
      EventId id = std::string(kImplicitPartitionPrefix) + instance;
      while (out.base.find_event(id) != nullptr) id += "'";
      out.base.events.push_back(Event{id, instance, EventKind::Partition, {}});
      auto& order = out.base.lifelines[instance];
      order.insert(order.begin(), id);
      zero.events.push_back(id);
    }
    out.partitions.insert(out.partitions.begin(), std::move(zero));
    return out;
  }

  const Tcsd& tcsd_;
  const SequenceDiagram& d_;
  std::map<EventId, const Event*> events_;
  std::map<EventId, Position> positions_;
  std::vector<Violation> violations_;
};

ValidationResult validate(const Tcsd& raw) { return Validator(raw).run(); }

}  // namespace virtint

#include "virtint/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace virtint {

std::string to_string(const SourceSpan& span) {
  return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace {

std::string format_error(const SourceSpan& span, const std::string& message,
                         const std::vector<std::string>& expected) {
  std::string out = to_string(span) + ": " + message;
  if (!expected.empty()) {
    out += " (expected ";
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (k != 0) out += k + 1 == expected.size() ? " or " : ", ";
      out += expected[k];
    }
    out += ")";
  }
  return out;
}

}  // namespace

ParseError::ParseError(SourceSpan span, std::string message, std::vector<std::string> expected)
    : std::runtime_error(format_error(span, message, expected)),
      span_(std::move(span)),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

bool Architecture::has_component(const ComponentId& c) const {
  return std::find(components.begin(), components.end(), c) != components.end();
}

namespace {

enum class Tok { Ident, Number, String, LBrace, RBrace, Arrow, Colon, Comma, Equals, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    case Tok::String: return "string \"" + t.text + "\"";
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          t.text += advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        // Sign and fraction are lexed so the parser can reject them with a precise message.
        t.kind = Tok::Number;
        if (c == '-') t.text += advance();
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          t.text += advance();
        }
      } else if (c == '"') {
        t.kind = Tok::String;
        advance();
        for (;;) {
          if (pos_ >= src_.size() || src_[pos_] == '\n') {
            throw ParseError(t.span, "unterminated string literal");
          }
          char ch = advance();
          if (ch == '"') break;
          if (ch == '\\') {
            if (pos_ >= src_.size()) throw ParseError(t.span, "unterminated string literal");
            ch = advance();
          }
          t.text += ch;
        }
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        t.kind = Tok::Arrow;
        t.text = "->";
        advance();
        advance();
      } else {
        switch (c) {
          case '{': t.kind = Tok::LBrace; break;
          case '}': t.kind = Tok::RBrace; break;
          case ':': t.kind = Tok::Colon; break;
          case ',': t.kind = Tok::Comma; break;
          case '=': t.kind = Tok::Equals; break;
          default:
            throw ParseError(t.span, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, advance());
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan here() const { return SourceSpan{file_, line_, column_}; }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "tcsd", "sut", "test", "msg", "at", "timeout", "par", "alt", "op", "opt", "strict", "loop",
    "architecture", "components", "bind"};

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek() const { return tokens_[pos_]; }
  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
  bool at(Tok kind) const { return peek().kind == kind; }

  Token take() {
    Token t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().span, "unexpected " + describe(peek()), std::move(expected));
  }

  Token expect(Tok kind, const std::string& what) {
    if (!at(kind)) fail({what});
    return take();
  }

  Token expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    return take();
  }

  Token identifier(const std::string& what) {
    if (!at(Tok::Ident)) fail({what});
    return take();
  }

  std::uint32_t natural(const std::string& what) {
    if (!at(Tok::Number)) fail({what});
    Token t = take();
    if (!t.text.empty() && t.text[0] == '-') {
      throw ParseError(t.span, what + " must not be negative, got " + t.text);
    }
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec == std::errc::result_out_of_range) throw ParseError(t.span, what + " is out of range");
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError(t.span, what + " must be a non-negative integer, got " + t.text);
    }
    return value;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------

class TcsdBuilder {
 public:
  TcsdBuilder(TokenStream& ts, std::size_t* event_counter, std::size_t* fragment_counter)
      : ts_(ts), event_counter_(*event_counter), fragment_counter_(*fragment_counter) {}

  ParsedTcsd parse() {
    const Token head = ts_.expect_keyword("tcsd");
    const Token name = ts_.identifier("diagram name");
    out_.tcsd.base.name = name.text;
    out_.spans[name.text] = head.span;
    ts_.expect(Tok::LBrace, "'{'");

    ts_.expect_keyword("sut");
    const Token sut = ts_.identifier("sut instance name");
    declare(sut);
    out_.tcsd.sut = sut.text;
    if (!ts_.at_keyword("test")) ts_.fail({"'test'"});
    while (ts_.at_keyword("test")) {
      ts_.take();
      declare(ts_.identifier("test instance name"));
    }

    statements();
    ts_.expect(Tok::RBrace, "'}'");
    return std::move(out_);
  }

 private:
  void declare(const Token& t) {
    auto& instances = out_.tcsd.base.instances;
    if (std::find(instances.begin(), instances.end(), t.text) != instances.end()) {
      throw ParseError(t.span, "duplicate instance line '" + t.text + "'");
    }
    instances.push_back(t.text);
    out_.tcsd.base.lifelines[t.text];
    out_.spans[t.text] = t.span;
  }

  const std::vector<std::string>& statement_starts() const {
    static const std::vector<std::string> starts = {"'msg'", "'at'", "'timeout'", "'par'", "'alt'",
                                                    "'opt'", "'strict'", "'loop'", "'}'"};
    return starts;
  }

  void statements() {
    for (;;) {
      if (ts_.at(Tok::RBrace)) return;
      const Token& t = ts_.peek();
      if (t.kind != Tok::Ident) ts_.fail(statement_starts());
      if (t.text == "msg") {
        message();
      } else if (t.text == "at") {
        partition();
      } else if (t.text == "timeout") {
        timeout();
      } else if (t.text == "par" || t.text == "alt") {
        fragment(t.text == "par" ? Operator::Par : Operator::Alt, true);
      } else if (t.text == "opt" || t.text == "strict" || t.text == "loop") {
        fragment(t.text == "opt" ? Operator::Opt : t.text == "strict" ? Operator::Strict : Operator::Loop, false);
      } else {
        ts_.fail(statement_starts());
      }
    }
  }

  EventId add_event(const InstanceId& instance, EventKind kind, const SourceSpan& span,
                    const FragmentId& fragment = {}) {
    EventId id = "e" + std::to_string(event_counter_++);
    out_.tcsd.base.events.push_back(Event{id, instance, kind, fragment});
    out_.tcsd.base.lifelines[instance].push_back(id);
    out_.spans[id] = span;
    for (Operand* op : open_operands_) op->events.insert(id);
    return id;
  }

  InstanceId instance_ref(const std::string& what) {
    const Token t = ts_.identifier(what);
    const auto& instances = out_.tcsd.base.instances;
    if (std::find(instances.begin(), instances.end(), t.text) == instances.end()) {
      throw ParseError(t.span, "unknown instance line '" + t.text + "'");
    }
    return t.text;
  }

  void message() {
    const Token kw = ts_.take();
    const InstanceId from = instance_ref("sender instance");
    ts_.expect(Tok::Arrow, "'->'");
    const InstanceId to = instance_ref("receiver instance");
    ts_.expect(Tok::Colon, "':'");
    if (!ts_.at(Tok::Ident) && !ts_.at(Tok::String)) ts_.fail({"message label"});
    const Token label = ts_.take();

    const std::string key = "message#" + std::to_string(out_.tcsd.base.messages.size());
    const EventId send = add_event(from, EventKind::Send, kw.span);
    const EventId recv = add_event(to, EventKind::Receive, kw.span);
    out_.tcsd.base.messages.push_back(Message{send, label.text, recv});
    out_.spans[key] = kw.span;
  }

  void partition() {
    const Token kw = ts_.take();
    PartitionLine line;
    line.timestamp = ts_.natural("'at' time");
    const std::string key = "partition#" + std::to_string(out_.tcsd.partitions.size());
    for (const auto& instance : out_.tcsd.base.instances) {
      line.events.push_back(add_event(instance, EventKind::Partition, kw.span));
    }
    out_.tcsd.partitions.push_back(std::move(line));
    out_.spans[key] = kw.span;
  }

  void timeout() {
    const Token kw = ts_.take();
    const Token bound_tok = ts_.peek();
    const std::uint32_t bound = ts_.natural("timeout bound");
    if (bound == 0) throw ParseError(bound_tok.span, "timeout bound must be positive");
    const std::string key = "timeout#" + std::to_string(out_.tcsd.timeouts.size());
    out_.tcsd.timeouts.emplace_back();
    out_.spans[key] = kw.span;
    const std::size_t index = out_.tcsd.timeouts.size() - 1;

    const EventId start = add_event(out_.tcsd.sut, EventKind::TimeoutStart, kw.span);
    ts_.expect(Tok::LBrace, "'{'");
    statements();
    const Token close = ts_.expect(Tok::RBrace, "'}'");
    const EventId end = add_event(out_.tcsd.sut, EventKind::TimeoutEnd, close.span);
    out_.tcsd.timeouts[index] = Timeout{start, end, bound};
  }

  void fragment(Operator op, bool multi_operand) {
    const Token kw = ts_.take();
    std::optional<std::uint32_t> bound;
    if (op == Operator::Loop) bound = ts_.natural("loop bound");

    const FragmentId id = "f" + std::to_string(fragment_counter_++);
    out_.spans[id] = kw.span;
    if (!open_fragments_.empty()) {
      auto& parent = out_.tcsd.base.fragments[open_fragments_.back().first];
      parent.operands[open_fragments_.back().second].children.push_back(id);
    }
    const std::size_t index = out_.tcsd.base.fragments.size();
    out_.tcsd.base.fragments.push_back(Fragment{id, op, {}, bound});
    rebuild_open_operands();

    for (const auto& instance : out_.tcsd.base.instances) {
      add_event(instance, EventKind::FragmentEnter, kw.span, id);
    }
    ts_.expect(Tok::LBrace, "'{'");
    if (multi_operand) {
      if (!ts_.at_keyword("op")) ts_.fail({"'op'"});
      while (ts_.at_keyword("op")) {
        ts_.take();
        ts_.expect(Tok::LBrace, "'{'");
        operand_body(index);
        ts_.expect(Tok::RBrace, "'}'");
      }
    } else {
      operand_body(index);
    }
    const Token close = ts_.expect(Tok::RBrace, multi_operand ? "'op' or '}'" : "'}'");
    for (const auto& instance : out_.tcsd.base.instances) {
      add_event(instance, EventKind::FragmentExit, close.span, id);
    }
  }

  void operand_body(std::size_t fragment_index) {
    auto& fragments = out_.tcsd.base.fragments;
    fragments[fragment_index].operands.emplace_back();
    const std::size_t operand_index = fragments[fragment_index].operands.size() - 1;
    open_fragments_.emplace_back(fragment_index, operand_index);
    rebuild_open_operands();
    statements();
    open_fragments_.pop_back();
    rebuild_open_operands();
  }

  // Operand pointers are refreshed whenever the fragment vector may have grown.
  void rebuild_open_operands() {
    open_operands_.clear();
    for (const auto& [f, o] : open_fragments_) {
      open_operands_.push_back(&out_.tcsd.base.fragments[f].operands[o]);
    }
  }

  TokenStream& ts_;
  std::size_t& event_counter_;
  std::size_t& fragment_counter_;
  ParsedTcsd out_;
  std::vector<std::pair<std::size_t, std::size_t>> open_fragments_;
  std::vector<Operand*> open_operands_;
};

}  // namespace

std::vector<ParsedTcsd> parse_tcsd_file(std::string_view source, const std::string& file) {
  TokenStream ts(Lexer(source, file).run());
  std::vector<ParsedTcsd> out;
  std::set<std::string> names;
  do {
    // Ids restart per diagram so a diagram's ids do not depend on its neighbours.
    std::size_t events = 0;
    std::size_t fragments = 0;
    const SourceSpan at = ts.peek().span;
    ParsedTcsd parsed = TcsdBuilder(ts, &events, &fragments).parse();
    if (!names.insert(parsed.tcsd.name()).second) {
      throw ParseError(at, "duplicate diagram name '" + parsed.tcsd.name() + "'");
    }
    out.push_back(std::move(parsed));
  } while (!ts.at(Tok::End));
  return out;
}

ParsedTcsd parse_tcsd(std::string_view source, const std::string& file) {
  auto all = parse_tcsd_file(source, file);
  if (all.size() != 1) {
    throw ParseError(all[1].spans.at(all[1].tcsd.name()), "expected exactly one diagram");
  }
  return std::move(all.front());
}

// ---------------------------------------------------------------------------

Architecture parse_architecture(std::string_view source, const std::string& file) {
  TokenStream ts(Lexer(source, file).run());
  Architecture arch;
  ts.expect_keyword("architecture");
  arch.name = ts.identifier("architecture name").text;
  ts.expect(Tok::LBrace, "'{'");

  ts.expect_keyword("components");
  if (ts.at(Tok::Ident) && !ts.at_keyword("bind")) {
    for (;;) {
      const Token c = ts.identifier("component name");
      if (arch.has_component(c.text)) throw ParseError(c.span, "duplicate component '" + c.text + "'");
      arch.components.push_back(c.text);
      if (!ts.at(Tok::Comma)) break;
      ts.take();
    }
  }

  auto component = [&](const std::string& what) {
    const Token c = ts.identifier(what);
    if (!arch.has_component(c.text)) throw ParseError(c.span, "unknown component '" + c.text + "'");
    return c.text;
  };

  while (ts.at_keyword("bind")) {
    const Token kw = ts.take();
    const Token name = ts.identifier("test case name");
    if (arch.bindings.count(name.text) != 0) {
      throw ParseError(name.span, "second binding for test case '" + name.text + "'");
    }
    TcsdBinding b;
    b.tcsd = name.text;
    b.span = kw.span;
    ts.expect(Tok::LBrace, "'{'");
    ts.expect_keyword("sut");
    ts.expect(Tok::Equals, "'='");
    b.sut = component("sut component");
    while (ts.at(Tok::Ident)) {
      if (ts.at_keyword("sut")) {
        throw ParseError(ts.peek().span, "binding '" + name.text + "' already names its sut");
      }
      const Token instance = ts.take();
      ts.expect(Tok::Arrow, "'->'");
      const ComponentId target = component("component");
      if (!b.tests.emplace(instance.text, target).second) {
        throw ParseError(instance.span, "test instance '" + instance.text + "' mapped twice");
      }
    }
    ts.expect(Tok::RBrace, "'}'");
    arch.bindings.emplace(name.text, std::move(b));
  }
  if (!ts.at(Tok::RBrace)) ts.fail({"'bind'", "'}'"});
  ts.take();
  if (!ts.at(Tok::End)) ts.fail({"end of input"});
  return arch;
}

// ---------------------------------------------------------------------------

namespace {

bool is_plain_identifier(const std::string& s) {
  if (s.empty() || kKeywords.count(s) != 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string quote_label(const std::string& s) {
  if (is_plain_identifier(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

class Printer {
 public:
  explicit Printer(const Tcsd& tcsd) : tcsd_(tcsd), d_(tcsd.base) {
    for (const auto& e : d_.events) events_[e.id] = &e;
    for (std::size_t k = 0; k < d_.messages.size(); ++k) {
      message_of_[d_.messages[k].send] = k;
      message_of_[d_.messages[k].receive] = k;
    }
    for (const auto& p : tcsd_.partitions) {
      for (const auto& e : p.events) partition_of_[e] = p.timestamp;
    }
    for (const auto& c : tcsd_.timeouts) {
      timeout_start_[c.start] = c.bound;
      timeout_end_.insert(c.end);
    }
    anchor_test_messages();
  }

  std::string run() {
    out_ << "tcsd " << d_.name << " {\n";
    out_ << "  sut " << tcsd_.sut << "\n";
    for (const auto& i : d_.instances) {
      if (i != tcsd_.sut) out_ << "  test " << i << "\n";
    }
    const auto it = d_.lifelines.find(tcsd_.sut);
    if (it != d_.lifelines.end()) sequence(it->second, 1);
    for (std::size_t k : trailing_) message(k, 1);
    out_ << "}\n";
    return out_.str();
  }

 private:
  void indent(int depth) {
    for (int k = 0; k <= depth - 1; ++k) out_ << "  ";
  }

  bool on_sut(const EventId& e) const { return events_.at(e)->instance == tcsd_.sut; }

  bool touches_sut(const Message& m) const { return on_sut(m.send) || on_sut(m.receive); }

  // SUT event printed by the same statement as `e`, if that statement reaches
  // the SUT line.
  std::optional<EventId> sut_statement(const EventId& e) const {
    const Event& ev = *events_.at(e);
    switch (ev.kind) {
      case EventKind::Send:
      case EventKind::Receive: {
        const Message& m = d_.messages.at(message_of_.at(e));
        if (!touches_sut(m)) return std::nullopt;
        return on_sut(m.send) ? m.send : m.receive;
      }
      case EventKind::Partition:
        for (const auto& line : tcsd_.partitions) {
          if (std::find(line.events.begin(), line.events.end(), e) == line.events.end()) continue;
          for (const auto& other : line.events) {
            if (on_sut(other)) return other;
          }
        }
        return std::nullopt;
      case EventKind::FragmentEnter:
      case EventKind::FragmentExit: {
        const auto sut = d_.lifelines.find(tcsd_.sut);
        if (sut == d_.lifelines.end()) return std::nullopt;
        for (const auto& other : sut->second) {
          const Event& o = *events_.at(other);
          if (o.kind == ev.kind && o.fragment == ev.fragment) return other;
        }
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  bool same_operands(const EventId& a, const EventId& b) const {
    for (const auto& f : d_.fragments) {
      for (const auto& o : f.operands) {
        if ((o.events.count(a) != 0) != (o.events.count(b) != 0)) return false;
      }
    }
    return true;
  }

  // Innermost operand holding `e`; nullopt at top level.
  std::optional<std::pair<FragmentId, std::size_t>> operand_of(const EventId& e) const {
    std::optional<std::pair<FragmentId, std::size_t>> best;
    std::size_t best_size = 0;
    for (const auto& f : d_.fragments) {
      for (std::size_t k = 0; k < f.operands.size(); ++k) {
        const auto& events = f.operands[k].events;
        if (events.count(e) != 0 && (!best || events.size() < best_size)) {
          best = {f.id, k};
          best_size = events.size();
        }
      }
    }
    return best;
  }

  // Messages between test lines are printed right before the next statement
  // on the sender's line that also reaches the SUT line, or at the end of
  // their operand when there is none.
  void anchor_test_messages() {
    for (std::size_t k = 0; k < d_.messages.size(); ++k) {
      const Message& m = d_.messages[k];
      if (touches_sut(m)) continue;
      const auto& line = d_.lifelines.at(events_.at(m.send)->instance);
      auto it = std::find(line.begin(), line.end(), m.send);
      std::optional<EventId> anchor;
      for (++it; it != line.end() && !anchor && same_operands(m.send, *it); ++it) anchor = sut_statement(*it);
      if (anchor) {
        before_[*anchor].push_back(k);
      } else if (auto operand = operand_of(m.send)) {
        tails_[*operand].push_back(k);
      } else {
        trailing_.push_back(k);
      }
    }
  }

  void message(std::size_t k, int depth) {
    const Message& m = d_.messages.at(k);
    indent(depth);
    out_ << "msg " << events_.at(m.send)->instance << " -> " << events_.at(m.receive)->instance << " : "
         << quote_label(m.label) << "\n";
  }

  void sequence(const std::vector<EventId>& seq, int depth) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const Event& ev = *events_.at(seq[i]);
      if (auto it = before_.find(ev.id); it != before_.end()) {
        for (std::size_t k : it->second) message(k, depth);
      }
      switch (ev.kind) {
        case EventKind::Send:
        case EventKind::Receive:
          message(message_of_.at(ev.id), depth);
          break;
        case EventKind::Partition:
          indent(depth);
          out_ << "at " << partition_of_.at(ev.id) << "\n";
          break;
        case EventKind::TimeoutStart:
        case EventKind::TimeoutEnd: {
          if (ev.kind == EventKind::TimeoutEnd || timeout_start_.count(ev.id) == 0) {
            throw std::invalid_argument("print_tcsd: unmatched timeout event " + ev.id);
          }
          std::size_t j = i + 1;
          int nesting = 0;
          for (; j < seq.size(); ++j) {
            const Event& cand = *events_.at(seq[j]);
            if (cand.kind == EventKind::TimeoutStart) ++nesting;
            if (cand.kind == EventKind::TimeoutEnd) {
              if (nesting == 0) break;
              --nesting;
            }
          }
          if (j == seq.size() || timeout_end_.count(seq[j]) == 0) {
            throw std::invalid_argument("print_tcsd: timeout is not block shaped at " + ev.id);
          }
          indent(depth);
          out_ << "timeout " << timeout_start_.at(ev.id) << " {\n";
          sequence({seq.begin() + static_cast<std::ptrdiff_t>(i) + 1, seq.begin() + static_cast<std::ptrdiff_t>(j)},
                   depth + 1);
          indent(depth);
          out_ << "}\n";
          i = j;
          break;
        }
        case EventKind::FragmentEnter: {
          const Fragment* f = d_.find_fragment(ev.fragment);
          std::size_t j = i + 1;
          while (j < seq.size() && !(events_.at(seq[j])->kind == EventKind::FragmentExit &&
                                     events_.at(seq[j])->fragment == ev.fragment)) {
            ++j;
          }
          if (f == nullptr || j == seq.size()) {
            throw std::invalid_argument("print_tcsd: unbalanced fragment " + ev.fragment);
          }
          indent(depth);
          out_ << to_string(f->op);
          if (f->op == Operator::Loop) out_ << " " << f->loop_bound.value_or(0);
          out_ << " {\n";
          const bool multi = f->op == Operator::Par || f->op == Operator::Alt;
          for (std::size_t oi = 0; oi < f->operands.size(); ++oi) {
            const auto& operand = f->operands[oi];
            std::vector<EventId> inner;
            for (std::size_t k = i + 1; k < j; ++k) {
              if (operand.events.count(seq[k]) != 0) inner.push_back(seq[k]);
            }
            const int inner_depth = multi ? depth + 2 : depth + 1;
            if (multi) {
              indent(depth + 1);
              out_ << "op {\n";
            }
            sequence(inner, inner_depth);
            if (auto it = tails_.find({f->id, oi}); it != tails_.end()) {
              for (std::size_t k : it->second) message(k, inner_depth);
            }
            if (multi) {
              indent(depth + 1);
              out_ << "}\n";
            }
          }
          indent(depth);
          out_ << "}\n";
          i = j;
          break;
        }
        case EventKind::FragmentExit:
          throw std::invalid_argument("print_tcsd: unbalanced fragment exit " + ev.id);
      }
    }
  }

  const Tcsd& tcsd_;
  const SequenceDiagram& d_;
  std::map<EventId, const Event*> events_;
  std::map<EventId, std::size_t> message_of_;
  std::map<EventId, Ticks> partition_of_;
  std::map<EventId, Ticks> timeout_start_;
  std::set<EventId> timeout_end_;
  std::map<EventId, std::vector<std::size_t>> before_;
  std::map<std::pair<FragmentId, std::size_t>, std::vector<std::size_t>> tails_;
  std::vector<std::size_t> trailing_;
  std::ostringstream out_;
};

}  // namespace

std::string print_tcsd(const Tcsd& tcsd) {
  for (const auto& m : tcsd.base.messages) {
    if (tcsd.base.find_event(m.send) == nullptr || tcsd.base.find_event(m.receive) == nullptr) {
      throw std::invalid_argument("print_tcsd: message '" + m.label + "' has unknown events");
    }
  }
  for (const auto& t : tcsd.timeouts) {
    const Event* s = tcsd.base.find_event(t.start);
    const Event* e = tcsd.base.find_event(t.end);
    if (s == nullptr || e == nullptr || s->kind != EventKind::TimeoutStart || e->kind != EventKind::TimeoutEnd) {
      throw std::invalid_argument("print_tcsd: timeout " + t.start + " is not a timeout block");
    }
  }
  return Printer(tcsd).run();
}

std::string print_architecture(const Architecture& arch) {
  std::ostringstream out;
  out << "architecture " << arch.name << " {\n  components";
  for (std::size_t k = 0; k < arch.components.size(); ++k) {
    out << (k == 0 ? " " : ", ") << arch.components[k];
  }
  out << "\n";
  for (const auto& [name, b] : arch.bindings) {
    out << "  bind " << name << " {\n    sut = " << b.sut << "\n";
    for (const auto& [instance, component] : b.tests) out << "    " << instance << " -> " << component << "\n";
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace virtint

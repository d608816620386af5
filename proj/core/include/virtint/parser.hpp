// Concrete syntax for test-case sequence diagrams (.tcsd) and component
// architectures (.arch).
//
//   tcsd NAME { sut ID (test ID)+ STMT* }
//   STMT := msg ID -> ID : LABEL
//         | at INT
//         | timeout INT { STMT* }
//         | par { op { STMT* } op { STMT* } (op { STMT* })* }
//         | alt { op { STMT* } op { STMT* } (op { STMT* })* }
//         | opt { STMT* } | strict { STMT* } | loop INT { STMT* }
//
//   architecture NAME { components (ID (, ID)*)? (bind NAME { sut = ID (ID -> ID)* })* }
//
// LABEL is an identifier or a double-quoted string. `#` starts a comment.
#ifndef VIRTINT_PARSER_HPP
#define VIRTINT_PARSER_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "virtint/model.hpp"

namespace virtint {

using ComponentId = std::string;

struct SourceSpan {
  std::string file;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

std::string to_string(const SourceSpan& span);

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, std::string message, std::vector<std::string> expected = {});

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::string message_;
  std::vector<std::string> expected_;
};

struct ParsedTcsd {
  Tcsd tcsd;
  /// Keyed by the element names used in Violation::elements: event, fragment
  /// and instance ids, "message#k", "partition#k", "timeout#k" and the diagram
  /// name itself.
  std::map<std::string, SourceSpan> spans;
};

/// A file may declare several diagrams; names must be distinct.
std::vector<ParsedTcsd> parse_tcsd_file(std::string_view source, const std::string& file = "<input>");

/// Exactly one diagram.
ParsedTcsd parse_tcsd(std::string_view source, const std::string& file = "<input>");

struct TcsdBinding {
  std::string tcsd;
  ComponentId sut;
  /// Test instance line -> component.
  std::map<InstanceId, ComponentId> tests;
  SourceSpan span;
};

struct Architecture {
  std::string name;
  std::vector<ComponentId> components;
  std::map<std::string, TcsdBinding> bindings;  // by tcsd name

  bool has_component(const ComponentId& c) const;
};

Architecture parse_architecture(std::string_view source, const std::string& file = "<input>");

/// Renders a diagram back to the DSL. Only diagrams the DSL can express are
/// accepted (fragments spanning every lifeline, block-shaped timeouts);
/// throws std::invalid_argument otherwise.
std::string print_tcsd(const Tcsd& tcsd);

std::string print_architecture(const Architecture& arch);

}  // namespace virtint

#endif  // VIRTINT_PARSER_HPP

#include "virtint/export.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"

namespace virtint {

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string ages_text(const std::vector<Age>& ages) {
  std::string out = "{";
  for (std::size_t k = 0; k < ages.size(); ++k) out += (k ? "," : "") + std::to_string(ages[k]);
  return out + "}";
}

}  // namespace

std::string to_dot(const Tapn& net, const std::optional<Marking>& marking, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(name) << "\" {\n";
  out << "  rankdir=LR;\n";
  for (std::uint32_t k = 0; k < net.place_count(); ++k) {
    const PlaceId p{k};
    const bool marked = marking && k < marking->place_count() && marking->count(p) > 0;
    std::string label = dot_escape(net.place(p).name);
    if (marked) label += "\\n" + ages_text(marking->tokens(p));
    out << "  p" << k << " [shape=" << (marked ? "doublecircle" : "circle") << ", label=\"" << label
        << "\"];\n";
  }
  for (std::uint32_t k = 0; k < net.transition_count(); ++k) {
    const auto& t = net.transition(TransitionId{k});
    std::string label = dot_escape(t.name);
    if (t.label) label += "\\n" + dot_escape(*t.label);
    out << "  t" << k << " [shape=box, label=\"" << label << "\"];\n";
  }
  for (const auto& a : net.input_arcs()) {
    out << "  p" << a.place.value << " -> t" << a.transition.value << " [label=\""
        << to_string(a.guard, "∞") << "\"];\n";
  }
  for (const auto& a : net.output_arcs()) {
    out << "  t" << a.transition.value << " -> p" << a.place.value << ";\n";
  }
  for (const auto& a : net.transport_arcs()) {
    out << "  p" << a.source.value << " -> t" << a.transition.value << " [arrowhead=diamond, label=\""
        << to_string(a.guard, "∞") << "\"];\n";
    out << "  t" << a.transition.value << " -> p" << a.target.value << " [arrowhead=diamond];\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const TranslationUnit& tu) { return to_dot(tu.net, tu.m0, tu.name); }

namespace {

// TAPAAL identifiers: [A-Za-z_][A-Za-z0-9_]*, unique across places,
// transitions and the net itself.
class Namer {
 public:
  std::string operator()(const std::string& raw) {
    std::string s;
    for (char c : raw) s += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) s = "_" + s;
    std::string candidate = s;
    for (std::size_t k = 2; used_.count(candidate); ++k) candidate = s + "_" + std::to_string(k);
    used_.insert(candidate);
    return candidate;
  }

 private:
  std::set<std::string> used_;
};

}  // namespace

std::string to_tapaal_xml(const TranslationUnit& tu) {
  const Tapn& net = tu.net;
  Namer namer;
  const std::string net_name = namer(tu.name.empty() ? "TAPN" : tu.name);
  std::vector<std::string> places;
  for (const auto& p : net.places()) places.push_back(namer(p.name));
  std::vector<std::string> transitions;
  for (const auto& t : net.transitions()) transitions.push_back(namer(t.label ? t.name + "_" + *t.label : t.name));

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out << "<pnml xmlns=\"http://www.informatik.hu-berlin.de/top/pnml/ptNetb\">\n";
  out << "  <!-- virtint TAPAAL export, format version " << kTapaalFormatVersion << " -->\n";
  out << "  <net active=\"true\" id=\"" << net_name << "\" type=\"P/T net\">\n";
  for (std::uint32_t k = 0; k < net.place_count(); ++k) {
    const std::size_t tokens = k < tu.m0.place_count() ? tu.m0.count(PlaceId{k}) : 0;
    out << "    <place displayName=\"true\" id=\"" << places[k] << "\" initialMarking=\"" << tokens
        << "\" invariant=\"&lt; inf\" name=\"" << places[k] << "\" nameOffsetX=\"0\" nameOffsetY=\"0\" positionX=\""
        << 60 + 120 * (k % 10) << "\" positionY=\"" << 60 + 180 * (k / 10) << "\"/>\n";
  }
  for (std::uint32_t k = 0; k < net.transition_count(); ++k) {
    out << "    <transition angle=\"0\" displayName=\"true\" id=\"" << transitions[k]
        << "\" infiniteServer=\"false\" name=\"" << transitions[k]
        << "\" nameOffsetX=\"0\" nameOffsetY=\"0\" priority=\"0\" urgent=\"false\" positionX=\""
        << 120 + 120 * (k % 10) << "\" positionY=\"" << 150 + 180 * (k / 10) << "\"/>\n";
  }
  for (const auto& a : net.input_arcs()) {
    out << "    <inputArc inscription=\"" << to_string(a.guard, "inf") << "\" source=\"" << places[a.place.value]
        << "\" target=\"" << transitions[a.transition.value] << "\"/>\n";
  }
  for (const auto& a : net.output_arcs()) {
    out << "    <outputArc inscription=\"1\" source=\"" << transitions[a.transition.value] << "\" target=\""
        << places[a.place.value] << "\"/>\n";
  }
  for (const auto& a : net.transport_arcs()) {
    out << "    <transportArc inscription=\"" << to_string(a.guard, "inf") << "\" source=\""
        << places[a.source.value] << "\" transition=\"" << transitions[a.transition.value] << "\" target=\""
        << places[a.target.value] << "\"/>\n";
  }
  out << "  </net>\n";

  // Exact target: listed counts, every other place empty.
  std::vector<std::size_t> want(net.place_count(), 0);
  for (const auto& [p, n] : tu.target.counts) want.at(p.value) = n;
  std::string formula = "EF (";
  for (std::uint32_t k = 0; k < net.place_count(); ++k) {
    if (k) formula += " and ";
    formula += net_name + "." + places[k] + " = " + std::to_string(want[k]);
  }
  formula += ")";
  const std::size_t capacity = net.output_arcs().size();
  out << "  <query active=\"true\" capacity=\"" << capacity
      << "\" extrapolationOption=\"AUTOMATIC\" hashTableSize=\"MB_16\" inclusionPlaces=\"*NONE*\" name=\"target\" "
         "query=\""
      << xml_escape(formula)
      << "\" reductionOption=\"VerifyTAPNdiscreteVerification\" searchOption=\"BFS\" symmetry=\"true\" "
         "traceOption=\"NONE\"/>\n";
  out << "</pnml>\n";
  return out.str();
}

std::string to_report_json(const AnalysisReport& report, const std::vector<ReportInput>& inputs) {
  using nlohmann::ordered_json;
  if (report.verdicts.empty()) throw std::invalid_argument("to_report_json: report has no verdicts");

  ordered_json doc;
  doc["schema"] = "virtint-report";
  doc["schema_version"] = kReportSchemaVersion;
  doc["inputs"] = ordered_json::array();
  for (const auto& in : inputs) doc["inputs"].push_back({{"file", in.file}, {"sha256", in.sha256}});
  doc["units"] = report.units;

  const auto& o = report.options;
  doc["options"] = {
      {"policy", std::string(to_string(o.policy))},
      {"require_all", o.require_all},
      {"max_states", o.max_states},
      {"max_total_delay", o.max_total_delay ? ordered_json(*o.max_total_delay) : ordered_json(nullptr)},
      {"max_matchings", o.max_matchings},
  };
  doc["matchings"] = {
      {"total", report.total_matchings},
      {"analyzed", report.verdicts.size()},
      {"truncated", report.truncated},
  };

  std::size_t states = 0;
  ordered_json verdicts = ordered_json::array();
  for (std::size_t k = 0; k < report.verdicts.size(); ++k) {
    const Verdict& v = report.verdicts[k];
    ordered_json j;
    j["index"] = k;
    j["status"] = std::string(to_string(v.status));
    j["matching"] = ordered_json::array();
    for (const auto& p : v.pairs) j["matching"].push_back({{"first", p.first}, {"second", p.second}, {"label", p.label}});
    j["timed"] = std::string(to_string(v.timed));
    j["untimed"] = v.untimed ? ordered_json(std::string(to_string(*v.untimed))) : ordered_json(nullptr);
    j["delay_bound"] = v.delay_bound;
    j["witness"] = ordered_json::array();
    for (const auto& s : v.witness) {
      j["witness"].push_back({{"delay", s.delay},
                              {"transition", s.transition},
                              {"label", s.label ? ordered_json(*s.label) : ordered_json(nullptr)}});
    }
    j["blocking"] = v.blocking;
    j["blocking_transitions"] = v.blocking_transitions;
    j["stats"] = {
        {"states", v.stats.states},
        {"peak_frontier", v.stats.peak_frontier},
        {"dead_markings", v.stats.dead_markings},
    };
    states += v.stats.states;
    verdicts.push_back(std::move(j));
  }
  doc["verdicts"] = std::move(verdicts);
  doc["overall"] = std::string(to_string(report.overall));
  doc["stats"] = {{"states", states}};
  return doc.dump(2) + "\n";
}

}  // namespace virtint

// Text serializations: Graphviz DOT, TAPAAL-style PNML, and the JSON analysis
// report. All output is deterministic.
#ifndef VIRTINT_EXPORT_HPP
#define VIRTINT_EXPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "virtint/integrate.hpp"
#include "virtint/tapn.hpp"
#include "virtint/translate.hpp"

namespace virtint {

/// Places are circles (double circles when marked, with their token ages),
/// transitions are boxes showing the message label, transport arcs end in
/// diamonds. Guards annotate input edges with "∞" for the open end.
std::string to_dot(const Tapn& net, const std::optional<Marking>& marking = std::nullopt,
                   const std::string& name = "tapn");
std::string to_dot(const TranslationUnit& tu);

inline constexpr int kTapaalFormatVersion = 3;

/// PNML document in the TAPAAL interchange dialect with a reachability query
/// for the target marking. Names are rewritten into TAPAAL identifiers.
std::string to_tapaal_xml(const TranslationUnit& tu);

inline constexpr int kReportSchemaVersion = 1;

struct ReportInput {
  std::string file;
  std::string sha256;
};

/// Fails with std::invalid_argument on a report without verdicts.
std::string to_report_json(const AnalysisReport& report, const std::vector<ReportInput>& inputs = {});

}  // namespace virtint

#endif  // VIRTINT_EXPORT_HPP

#include "cli.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "virtint/export.hpp"
#include "virtint/integrate.hpp"
#include "virtint/model.hpp"
#include "virtint/parser.hpp"
#include "virtint/translate.hpp"

namespace virtint::cli {

namespace {

class Diagnostics {
 public:
  explicit Diagnostics(std::ostream& err) : err_(err) {
    const char* env = std::getenv("VIRTINT_COLOR");
    const std::string v = env ? env : "";
    color_ = v == "1" || v == "always" || v == "on";
  }

  void error(const std::string& where, const std::string& message) {
    if (!where.empty()) err_ << where << ": ";
    err_ << paint("error:", "\033[1;31m") << " " << message << "\n";
  }
  void note(const std::string& message) { err_ << paint("note:", "\033[1;36m") << " " << message << "\n"; }
  std::ostream& stream() { return err_; }

 private:
  std::string paint(const std::string& text, const char* code) const {
    return color_ ? std::string(code) + text + "\033[0m" : text;
  }

  std::ostream& err_;
  bool color_ = false;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return static_cast<bool>(out);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return hex.str();
}

bool same_path(const std::string& a, const std::string& b) {
  std::error_code ec;
  if (std::filesystem::exists(a, ec) && std::filesystem::exists(b, ec)) {
    return std::filesystem::equivalent(a, b, ec);
  }
  return std::filesystem::weakly_canonical(a, ec) == std::filesystem::weakly_canonical(b, ec);
}

std::string human(Status s) {
  switch (s) {
    case Status::Consistent: return "consistent";
    case Status::OrderingDeadlock: return "ordering deadlock";
    case Status::TimingConflict: return "timing conflict";
    case Status::BoundExceeded: return "search bound exceeded";
  }
  return "?";
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? sep : "") + items[k];
  return out;
}

struct SourceFile {
  std::string path;
  std::string content;
  std::vector<ParsedTcsd> diagrams;
};

enum class Load { Ok, Unreadable, Unparsable };

Load load(const std::string& path, SourceFile& file, Diagnostics& diag) {
  auto content = read_file(path);
  if (!content) {
    diag.error(path, "cannot read file");
    return Load::Unreadable;
  }
  file.path = path;
  file.content = std::move(*content);
  try {
    file.diagrams = parse_tcsd_file(file.content, path);
  } catch (const ParseError& e) {
    diag.error("", e.what());
    return Load::Unparsable;
  }
  return Load::Ok;
}

// Prints every violation; nullopt when there is one.
std::optional<ValidatedTcsd> check_valid(const ParsedTcsd& parsed, Diagnostics& diag) {
  ValidationResult result = validate(parsed.tcsd);
  for (const auto& v : result.violations) {
    SourceSpan span = parsed.spans.count(parsed.tcsd.name()) ? parsed.spans.at(parsed.tcsd.name()) : SourceSpan{};
    for (const auto& element : v.elements) {
      if (auto it = parsed.spans.find(element); it != parsed.spans.end()) {
        span = it->second;
        break;
      }
    }
    std::string msg = parsed.tcsd.name() + " violates " + std::string(to_string(v.clause)) + ": " + v.detail;
    if (!v.elements.empty()) msg += " [" + join(v.elements, ", ") + "]";
    diag.error(to_string(span), msg);
  }
  return std::move(result.validated);
}

int cmd_validate(const std::vector<std::string>& files, std::ostream& out, Diagnostics& diag) {
  int status = kOk;
  std::size_t diagrams = 0;
  for (const auto& path : files) {
    SourceFile file;
    switch (load(path, file, diag)) {
      case Load::Unreadable: status = kError; continue;
      case Load::Unparsable: status = std::max<int>(status, kFailed); continue;
      case Load::Ok: break;
    }
    for (const auto& parsed : file.diagrams) {
      ++diagrams;
      if (!check_valid(parsed, diag)) status = std::max<int>(status, kFailed);
    }
  }
  if (status == kOk) out << "ok: " << diagrams << " test case(s) valid in " << files.size() << " file(s)\n";
  return status;
}

struct TranslateConfig {
  std::string file;
  std::string name;
  std::string dot;
  std::string tapaal;
};

int cmd_translate(const TranslateConfig& cfg, std::ostream& out, Diagnostics& diag) {
  for (const auto& o : {cfg.dot, cfg.tapaal}) {
    if (!o.empty() && same_path(o, cfg.file)) {
      diag.error(o, "output path is also an input");
      return kError;
    }
  }
  SourceFile file;
  switch (load(cfg.file, file, diag)) {
    case Load::Unreadable: return kError;
    case Load::Unparsable: return kFailed;
    case Load::Ok: break;
  }
  const ParsedTcsd* chosen = nullptr;
  for (const auto& d : file.diagrams) {
    if (cfg.name.empty() ? file.diagrams.size() == 1 : d.tcsd.name() == cfg.name) chosen = &d;
  }
  if (!chosen) {
    std::vector<std::string> names;
    for (const auto& d : file.diagrams) names.push_back(d.tcsd.name());
    diag.error(cfg.file, cfg.name.empty() ? "file declares several test cases, pick one with --name (" +
                                                join(names, ", ") + ")"
                                          : "no test case named " + cfg.name);
    return kError;
  }
  auto validated = check_valid(*chosen, diag);
  if (!validated) {
    diag.note("translation refused for " + chosen->tcsd.name());
    return kFailed;
  }
  TranslationUnit tu;
  try {
    tu = translate(*validated);
  } catch (const TranslateError& e) {
    diag.error(cfg.file, e.what());
    return kFailed;
  }
  if (!cfg.dot.empty() && !write_file(cfg.dot, to_dot(tu))) {
    diag.error(cfg.dot, "cannot write file");
    return kError;
  }
  if (!cfg.tapaal.empty() && !write_file(cfg.tapaal, to_tapaal_xml(tu))) {
    diag.error(cfg.tapaal, "cannot write file");
    return kError;
  }
  const StructuralReport r = structural_report(tu);
  out << tu.name << ": " << tu.net.place_count() << " places, " << tu.net.transition_count() << " transitions ("
      << r.labeled << " labeled, " << r.silent << " silent), " << r.point_guarded << " partition guard(s), "
      << "branch depth " << r.branch_depth << ", largest constant " << r.max_constant << "\n";
  return kOk;
}

struct CheckConfig {
  std::string arch;
  std::vector<std::string> files;
  std::string dot;
  std::string tapaal;
  std::string report;
  bool cross_product = false;
  CheckOptions options;
};

void describe_run(const AnalysisReport& report, std::ostream& s) {
  s << join(report.units, " + ") << ": " << to_string(report.overall);
  s << " (" << report.verdicts.size() << " of " << report.total_matchings << " matching(s) analyzed"
    << (report.truncated ? ", enumeration truncated" : "") << ")\n";
  for (std::size_t k = 0; k < report.verdicts.size(); ++k) {
    const Verdict& v = report.verdicts[k];
    s << "  matching " << k + 1 << ": " << human(v.status);
    if (v.status == Status::BoundExceeded) s << " (states " << v.stats.states << ", delay bound " << v.delay_bound << ")";
    s << "\n";
    if (!v.blocking.empty()) s << "    blocking labels: " << join(v.blocking, ", ") << "\n";
    if (v.status == Status::Consistent) {
      s << "    witness:\n";
      for (const auto& step : v.witness) {
        s << "      +" << step.delay << " " << step.transition;
        if (step.label) s << " [" << *step.label << "]";
        s << "\n";
      }
    }
  }
}

int cmd_check(const CheckConfig& cfg, std::ostream& out, Diagnostics& diag) {
  for (const auto& o : {cfg.dot, cfg.tapaal, cfg.report}) {
    if (o.empty()) continue;
    for (const auto& in : cfg.files) {
      if (same_path(o, in)) {
        diag.error(o, "output path is also an input");
        return kError;
      }
    }
    if (same_path(o, cfg.arch)) {
      diag.error(o, "output path is also an input");
      return kError;
    }
  }

  auto arch_text = read_file(cfg.arch);
  if (!arch_text) {
    diag.error(cfg.arch, "cannot read file");
    return kError;
  }
  Architecture arch;
  try {
    arch = parse_architecture(*arch_text, cfg.arch);
  } catch (const ParseError& e) {
    diag.error("", e.what());
    return kError;
  }
  std::vector<ReportInput> inputs{{cfg.arch, sha256_hex(*arch_text)}};

  std::vector<ValidatedTcsd> validated;
  for (const auto& path : cfg.files) {
    SourceFile file;
    if (load(path, file, diag) != Load::Ok) return kError;
    inputs.push_back({path, sha256_hex(file.content)});
    for (const auto& parsed : file.diagrams) {
      auto v = check_valid(parsed, diag);
      if (!v) {
        diag.note("check needs valid test cases; " + parsed.tcsd.name() + " is not");
        return kError;
      }
      validated.push_back(std::move(*v));
    }
  }
  if (validated.size() < 2) {
    diag.error("", "check needs at least two test cases");
    return kError;
  }

  // Test cases grouped by the component they test, in order of appearance.
  std::vector<std::pair<ComponentId, std::vector<std::size_t>>> groups;
  std::vector<TranslationUnit> units;
  for (std::size_t k = 0; k < validated.size(); ++k) {
    const std::string& name = validated[k].name();
    auto b = arch.bindings.find(name);
    if (b == arch.bindings.end()) {
      diag.error(cfg.arch, "no binding for test case " + name);
      return kError;
    }
    auto g = std::find_if(groups.begin(), groups.end(), [&](const auto& e) { return e.first == b->second.sut; });
    if (g == groups.end()) {
      groups.push_back({b->second.sut, {k}});
    } else {
      g->second.push_back(k);
    }
    try {
      units.push_back(translate(validated[k]));
    } catch (const TranslateError& e) {
      diag.error(name, e.what());
      return kError;
    }
  }
  if (!cfg.cross_product) {
    for (const auto& [component, members] : groups) {
      if (members.size() > 1) {
        std::vector<std::string> names;
        for (auto m : members) names.push_back(validated[m].name());
        diag.error(cfg.arch, "component " + component + " is tested by " + join(names, ", ") +
                                 "; pass --cross-product to check each combination");
        return kError;
      }
    }
  }
  if (groups.size() < 2) {
    diag.error("", "check needs test cases for at least two components");
    return kError;
  }

  std::vector<AnalysisReport> reports;
  std::optional<TranslationUnit> exported;
  std::vector<std::size_t> odometer(groups.size(), 0);
  for (bool done = false; !done;) {
    std::vector<TranslationUnit> run_units;
    std::vector<const Tcsd*> run_tcsds;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::size_t k = groups[g].second[odometer[g]];
      run_units.push_back(units[k]);
      run_tcsds.push_back(&validated[k].tcsd());
    }
    try {
      const InstanceMap map = bind_instances(arch, run_tcsds);
      reports.push_back(check_consistency(run_units, map, cfg.options));
    } catch (const BindingError& e) {
      diag.error(cfg.arch, e.what());
      return kError;
    } catch (const UnmatchedMessages& e) {
      diag.error("", e.what());
      return kError;
    }
    if (!exported) {
      const auto& verdicts = reports.back().verdicts;
      auto decisive = std::find_if(verdicts.begin(), verdicts.end(),
                                   [](const Verdict& v) { return v.status == Status::Consistent; });
      exported = merge(run_units, (decisive == verdicts.end() ? verdicts.front() : *decisive).matching);
    }

    done = true;
    for (std::size_t g = groups.size(); g-- > 0;) {
      if (++odometer[g] < groups[g].second.size()) {
        done = false;
        break;
      }
      odometer[g] = 0;
    }
  }

  if (!cfg.report.empty()) {
    std::string text;
    if (reports.size() == 1) {
      text = to_report_json(reports.front(), inputs);
    } else {
      text = "[\n";
      for (std::size_t k = 0; k < reports.size(); ++k) {
        text += to_report_json(reports[k], inputs);
        text.pop_back();
        text += k + 1 < reports.size() ? ",\n" : "\n";
      }
      text += "]\n";
    }
    if (!write_file(cfg.report, text)) {
      diag.error(cfg.report, "cannot write file");
      return kError;
    }
  }
  if (!cfg.dot.empty() && !write_file(cfg.dot, to_dot(*exported))) {
    diag.error(cfg.dot, "cannot write file");
    return kError;
  }
  if (!cfg.tapaal.empty() && !write_file(cfg.tapaal, to_tapaal_xml(*exported))) {
    diag.error(cfg.tapaal, "cannot write file");
    return kError;
  }

  bool inconsistent = false;
  bool inconclusive = false;
  std::ostringstream summary;
  for (const auto& r : reports) {
    inconsistent = inconsistent || r.overall == Overall::Inconsistent;
    inconclusive = inconclusive || r.overall == Overall::Inconclusive;
    describe_run(r, summary);
  }
  const int status = inconsistent ? kFailed : inconclusive ? kInconclusive : kOk;
  (status == kOk ? out : diag.stream()) << summary.str();
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Diagnostics diag(err);
  CLI::App app{"Virtual integration testing with timed test-case sequence diagrams", "virtint"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "virtint 0.1.0");

  std::vector<std::string> validate_files;
  auto* validate_cmd = app.add_subcommand("validate", "Check test-case diagrams for well-formedness");
  validate_cmd->add_option("files", validate_files, "Diagram files (.tcsd)")->required();

  TranslateConfig tcfg;
  auto* translate_cmd = app.add_subcommand("translate", "Translate one test case into a timed-arc Petri net");
  translate_cmd->add_option("file", tcfg.file, "Diagram file (.tcsd)")->required();
  translate_cmd->add_option("--name", tcfg.name, "Test case to translate when the file declares several");
  translate_cmd->add_option("--dot", tcfg.dot, "Write the net as Graphviz DOT");
  translate_cmd->add_option("--tapaal", tcfg.tapaal, "Write the net as TAPAAL PNML");

  CheckConfig ccfg;
  std::string policy = "maximal";
  std::optional<std::uint64_t> max_delay;
  auto* check_cmd = app.add_subcommand("check", "Integrate test cases and check consistency");
  check_cmd->add_option("files", ccfg.files, "Diagram files (.tcsd)")->required();
  check_cmd->add_option("--arch", ccfg.arch, "Architecture file (.arch)")->required();
  check_cmd->add_option("--dot", ccfg.dot, "Write the merged net of the decisive matching as DOT");
  check_cmd->add_option("--tapaal", ccfg.tapaal, "Write the merged net of the decisive matching as TAPAAL PNML");
  check_cmd->add_option("--report", ccfg.report, "Write the JSON analysis report");
  check_cmd->add_option("--policy", policy, "Matching policy")->check(CLI::IsMember({"maximal", "strict"}));
  check_cmd->add_flag("--require-all", ccfg.options.require_all, "Every matching must be consistent");
  check_cmd->add_option("--max-states", ccfg.options.max_states, "State bound per search")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-delay", max_delay, "Bound on total elapsed time per search")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--max-matchings", ccfg.options.max_matchings, "Matchings analyzed per run")
      ->check(CLI::PositiveNumber);
  check_cmd->add_flag("--cross-product", ccfg.cross_product,
                      "Check every combination when a component has several test cases");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int code = app.exit(e, help_out, help_err);
    if (code == 0) {
      out << help_out.str();
      return kOk;
    }
    err << help_err.str() << help_out.str();
    return kError;
  }

  if (*validate_cmd) return cmd_validate(validate_files, out, diag);
  if (*translate_cmd) return cmd_translate(tcfg, out, diag);
  ccfg.options.policy = policy == "strict" ? MatchPolicy::Strict : MatchPolicy::Maximal;
  ccfg.options.max_total_delay = max_delay;
  return cmd_check(ccfg, out, diag);
}

}  // namespace virtint::cli

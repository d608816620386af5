// Command-line front end: validate, translate and check subcommands.
#ifndef VIRTINT_CLI_HPP
#define VIRTINT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace virtint::cli {

enum ExitCode : int {
  kOk = 0,
  /// Invalid input (validate, translate) or inconsistent integration (check).
  kFailed = 1,
  /// Unreadable files, usage errors, bad bindings, unusable check inputs.
  kError = 2,
  /// A search bound was hit before the question was settled.
  kInconclusive = 3,
};

/// `args` excludes the program name. Success output goes to `out` only when
/// the exit code is kOk; everything else goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace virtint::cli

#endif  // VIRTINT_CLI_HPP

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "yflow/scenario.hpp"

namespace yflow {

/// Stopping override from --until: "t:<time>", "steps:<count>" or a bare time.
struct Until {
  std::optional<double> t;
  std::optional<long long> steps;
};

Until parse_until(const std::string& text);

struct AppOptions {
  std::filesystem::path scenario;
  /// Defaults to the scenario's [scenario] out key, then to "./out/<name>".
  std::filesystem::path out;
  Until until;
  int threads = 0;
  long long checkpoint_every = 0;
};

/// Subcommands. Each writes its JSON report into the output directory, echoes
/// it to `log`, and returns 0 iff every requested assertion passed.
int cmd_run(const AppOptions& opt, std::ostream& log);
int cmd_resume(const AppOptions& opt, std::ostream& log);
int cmd_eigen(const AppOptions& opt, std::ostream& log);
int cmd_check(const AppOptions& opt, std::ostream& log);
int cmd_supersolution(const AppOptions& opt, std::ostream& log);
int cmd_verify(const AppOptions& opt, std::ostream& log);

/// Dispatches by name; errors become exit code 2 with an error report.
int run_command(const std::string& name, const AppOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace yflow

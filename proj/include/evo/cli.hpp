#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evo {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitSolver = 3, kExitBound = 4 };

struct CliOptions {
  std::string config;
  std::string out_dir = ".";
  bool seed_given = false;
  unsigned long long seed = 1;
  unsigned threads = 0;
  bool dump_config = false;
  std::vector<double> k_list;
};

int cmd_solve(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_reflection(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_dump_config(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand plus flags) and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evo

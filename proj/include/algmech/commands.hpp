#ifndef ALGMECH_COMMANDS_HPP
#define ALGMECH_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "algmech/config.hpp"

namespace algmech {

struct CheckItem {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

struct RunReport {
  std::vector<CheckItem> items;

  bool all_passed() const;
};

// Exit codes shared by the command layer and the CLI shell.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDegeneracy = 3;

// Runs the structure checks requested by the config (finiteness, skew, lie,
// metric validation, noether) and returns one item per check.
RunReport cmd_check(const Model& model);

// Integrates the configured initial-value problem and streams CSV. Returns
// kExitOk, or kExitDegeneracy when the run aborted (partial CSV retained,
// diagnosis appended to `diagnostics`).
int cmd_simulate(const Model& model, std::ostream& csv_out, std::string& diagnostics);

// Human-readable symbolic summary: anchors, tensor blocks, explicit
// Euler-Lagrange right-hand sides, Christoffel coefficients, first integrals.
void cmd_describe(const Model& model, std::ostream& out);

void print_report(const RunReport& report, std::ostream& out);

// Full command dispatch used by the executable: argv-style arguments,
// returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace algmech

#endif

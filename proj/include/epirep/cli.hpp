#ifndef EPIREP_CLI_HPP
#define EPIREP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "epirep/config.hpp"

namespace epirep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Each command writes its CSV artifacts under cfg.output_dir and a short
// human-readable summary to `out`. They throw library errors; run() maps
// them to exit codes.
void cmd_equilibria(const RunConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);
/// Returns false when at least one branch failed (the others are still written).
bool cmd_bifurcate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_slowfast(const RunConfig& cfg, std::ostream& out);

/// Worker cap from EPIREP_THREADS, else the hardware concurrency.
unsigned thread_budget();

/// Full command line: `epirep <equilibria|simulate|bifurcate|slowfast> --config FILE ...`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epirep::cli

#endif  // EPIREP_CLI_HPP

#pragma once

// Command-line front end.
//
//   oce-rcps generate  [-o FILE]                  dataset JSONL (stdout by default)
//   oce-rcps calibrate --data FILE [-o DIR]       outcome.json, trace.csv
//   oce-rcps evaluate  --data FILE --lambda L     evaluation.json
//   oce-rcps trials    [--data FILE] [-o DIR]     trials.csv, summary.json, kde_*.csv
//   oce-rcps sweep     --vary delta --values ...  sweep.csv plus one directory per value
//
// Exit codes: 0 success, 1 infeasible calibration under --strict, 2 usage
// error, 3 data error. OCE_RCPS_LOG (error, info, debug) sets the stderr log
// level.

#include <iosfwd>
#include <string>
#include <vector>

namespace ocecal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ocecal::cli

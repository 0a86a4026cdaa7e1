#pragma once

#include <string>

#include "sparse_ocp/config.hpp"

namespace sparse_ocp {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCounterexample = 2;

struct RunOptions {
  std::string out_dir = ".";
  int workers = 1;
  bool dump_fields = false;
};

/// Executes the configured pipeline and writes summary.txt, report.csv and
/// trace.csv (solve) into out_dir. Returns kExitPass or kExitCounterexample;
/// library errors propagate.
int run_pipeline(const RunConfig& config, const RunOptions& opts);

/// Loads the config, runs it, and maps every error to kExitError with a
/// diagnostic on stderr.
int run(const std::string& config_path, const RunOptions& opts);

}  // namespace sparse_ocp

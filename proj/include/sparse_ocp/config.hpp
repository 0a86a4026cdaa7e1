#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparse_ocp/conditions.hpp"
#include "sparse_ocp/error.hpp"
#include "sparse_ocp/manufactured.hpp"
#include "sparse_ocp/optimize.hpp"

namespace sparse_ocp {

/// Malformed configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Mode { Solve, VerifyFoc, VerifySoc, Growth, Bounds, Cones };
const char* to_string(Mode mode);

struct ConeSettings {
  std::vector<double> tau{1e-2};
  std::size_t samples = 200;
  double tol_active = 1e-10;
  double tol_J = 2e-6;
  double band = -1.0;
  double min_ratio = 0.0;  ///< verify-soc passes when every min_ratio exceeds this
};

struct GrowthSettings {
  double epsilon = 0.1;
  std::size_t samples = 500;
  std::vector<double> rho{1e-3, 1e-2, 1e-1};
};

struct BoundsSettings {
  std::size_t samples = 200;
  std::vector<double> near_rho{1e-3, 1e-2, 1e-1};
  double stabilized = 0.1;  ///< allowed relative growth of a running sup
};

struct RunConfig {
  Mode mode = Mode::Solve;
  std::uint64_t seed = 0;
  ProblemSpec spec;
  /// Set when the problem was manufactured around a known stationary point.
  std::optional<StationaryInstance> instance;
  OptimizeOptions optimizer;
  int starts = 1;
  SolverOptions solver;
  ConeSettings cones;
  GrowthSettings growth;
  BoundsSettings bounds;
  std::vector<std::string> warnings;  ///< validation warnings
};

/// Parses a JSON configuration document. Relative CSV paths resolve against
/// base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

}  // namespace sparse_ocp

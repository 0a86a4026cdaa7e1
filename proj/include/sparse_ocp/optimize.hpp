#pragma once

#include <cstdint>
#include <vector>

#include "sparse_ocp/functional.hpp"

namespace sparse_ocp {

struct OptimizeOptions {
  double s0 = 1.0;                    ///< trial step at every iteration
  double backtrack = 0.5;             ///< step reduction factor, in (0,1)
  double sufficient_decrease = 1e-4;  ///< J(u+) <= J(u) - c ||u+ - u||^2 / s
  int max_iters = 2000;
  double stop_tol = 1e-8;             ///< on ||u+ - u||_{L2(Q)} / s
  std::uint64_t seed = 0;             ///< random restarts
  SolverOptions solver;
};

struct TraceRow {
  int iter = 0;
  double J = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct OptimizeResult {
  Field u;
  std::vector<TraceRow> trace;
  bool converged = false;
  double residual = 0.0;
  CostBreakdown cost;
  std::uint64_t seed = 0;  ///< restart seed (multistart only)
};

/// argmin_{p in [alpha, beta]} (p - w)^2 / 2 + s_mu |p| = clamp(soft(w, s_mu)).
double prox_scalar(double w, double s_mu, double alpha, double beta);

/// Pointwise prox of s mu |.| + indicator of [alpha, beta].
Field prox_box_l1(const Field& w, double s, double mu, double alpha, double beta);

/// u+ = prox(u - s phi_u) with backtracking on the quadratic upper model
/// F(u+) <= F(u) + <phi_u, u+ - u> + ||u+ - u||^2 / (2 s).
OptimizeResult proximal_gradient(const ProblemSpec& spec, const Field& u0, const OptimizeOptions& opts = {});

/// ||u - prox(u - s phi_u)||_{L2(Q)}; zero exactly at discrete stationary points.
double stationarity_residual(const ProblemSpec& spec, const Field& u, double s, const SolverOptions& opts = {});
double stationarity_residual(const ProblemSpec& spec, const Field& u, const Field& phi, double s);

/// Proximal gradient from `starts` random admissible controls (stream
/// (opts.seed, i)). Results are sorted by (J, seed); none is claimed global.
std::vector<OptimizeResult> multistart(const ProblemSpec& spec, int starts, const OptimizeOptions& opts,
                                       int workers = 1);

}  // namespace sparse_ocp

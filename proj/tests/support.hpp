#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sparse_ocp/conditions.hpp"
#include "sparse_ocp/manufactured.hpp"
#include "sparse_ocp/optimize.hpp"
#include "sparse_ocp/random_fields.hpp"

namespace testing {

using namespace sparse_ocp;

inline OddPolynomial cubic() { return OddPolynomial{{0.0, 0.0, 1.0}}; }

inline ProblemSpec make_spec(const SpaceTimeGrid& g, Nonlinearity f, double alpha, double beta, double mu,
                             int nu = 0) {
  ProblemSpec spec{.grid = g,
                   .op = OperatorA::laplacian(g.dim()),
                   .f = std::move(f),
                   .cost = {.y_d = Field::space_time(g), .nu_omega = nu, .y_omega = std::nullopt},
                   .alpha = alpha,
                   .beta = beta,
                   .mu = mu,
                   .y0 = Field::terminal_slice(g)};
  if (nu == 1) spec.cost.y_omega = Field::terminal_slice(g);
  return spec;
}

inline FieldRecipe sine(double amplitude, int mode = 1, std::vector<double> time_poly = {1.0}) {
  FieldRecipe r;
  r.kind = FieldRecipe::Kind::Sine;
  r.amplitude = amplitude;
  r.mode = mode;
  r.time_poly = std::move(time_poly);
  return r;
}

/// Random problem data: targets, initial datum and a random control.
inline ProblemSpec random_spec(const SpaceTimeGrid& g, Nonlinearity f, int nu, std::mt19937_64& rng) {
  ProblemSpec spec = make_spec(g, std::move(f), -1.0, 1.0, 0.0, nu);
  spec.cost.y_d = random_field(g, rng);
  const Field y0 = random_field(g, rng);
  for (std::size_t i = 0; i < g.nodes(); ++i) spec.y0[i] = 0.5 * y0[i];
  if (nu == 1) {
    const Field t = random_field(g, rng);
    spec.cost.y_omega = t.terminal();
  }
  return spec;
}

inline Field scaled_random(const SpaceTimeGrid& g, std::mt19937_64& rng, double scale) {
  Field f = random_field(g, rng);
  f *= scale;
  return f;
}

/// Sparse manufactured instance with sign-changing adjoint:
/// phi_bar = 0.3 sin(pi x) (1 - 2t), mu = 0.1, box [-1, 1].
inline StationaryInstance sparse_instance(Nonlinearity f, int nu = 0, int nx = 40, int nt = 40) {
  InstanceRecipe r{.grid = SpaceTimeGrid(1, nx, nt, 1.0),
                   .op = OperatorA::laplacian(1),
                   .f = std::move(f),
                   .mu = 0.1,
                   .alpha = -1.0,
                   .beta = 1.0,
                   .nu_omega = nu,
                   .phi_bar = sine(0.3, 1, {1.0, -2.0})};
  return build_stationary_instance(r);
}

/// Linear-quadratic tracking problem (f = 0, mu = 0, nu = 0) whose target is
/// the state of 3 sin(pi x), so the box [-1, 1] is partly active.
inline ProblemSpec convex_baseline_spec(int nx = 30, int nt = 30) {
  const SpaceTimeGrid g(1, nx, nt, 1.0);
  ProblemSpec spec = make_spec(g, ZeroNonlinearity{}, -1.0, 1.0, 0.0);
  spec.cost.y_d = solve_state(spec, evaluate_space_time(sine(3.0), g));
  return spec;
}

inline OptimizeResult solve_convex_baseline(const ProblemSpec& spec) {
  OptimizeOptions o;
  o.s0 = 50.0;
  o.stop_tol = 1e-11;
  o.max_iters = 20000;
  return proximal_gradient(spec, Field::space_time(spec.grid), o);
}

/// Least-squares slope of log(err) against log(param).
inline double observed_order(const std::vector<double>& param, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(param.size());
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double x = std::log(param[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing

#include "sparse_ocp/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_ocp/error.hpp"
#include "sparse_ocp/parallel.hpp"
#include "sparse_ocp/random_fields.hpp"

namespace sparse_ocp {

double prox_scalar(double w, double s_mu, double alpha, double beta) {
  const double soft = std::copysign(std::max(std::abs(w) - s_mu, 0.0), w);
  return std::clamp(soft, alpha, beta);
}

Field prox_box_l1(const Field& w, double s, double mu, double alpha, double beta) {
  if (!(s > 0.0)) throw InvalidInput("prox_box_l1: step must be positive");
  if (!(alpha < beta)) throw InvalidInput("prox_box_l1: alpha < beta required");
  Field p = w;
  const double t = s * mu;
  for (double& v : p.values()) v = prox_scalar(v, t, alpha, beta);
  return p;
}

namespace {

Field gradient_step(const Field& u, const Field& phi, double s) {
  Field w = u;
  w.axpy(-s, phi);
  return w;
}

}  // namespace

OptimizeResult proximal_gradient(const ProblemSpec& spec, const Field& u0, const OptimizeOptions& opts) {
  if (!(opts.s0 > 0.0) || !(opts.backtrack > 0.0 && opts.backtrack < 1.0) || opts.max_iters < 1 ||
      !(opts.stop_tol > 0.0) || !(opts.sufficient_decrease > 0.0))
    throw InvalidInput("proximal_gradient: invalid options");

  OptimizeResult result{.u = prox_box_l1(u0, 1.0, 0.0, spec.alpha, spec.beta)};
  Field y = solve_state(spec, result.u, opts.solver);
  double F = tracking_cost(spec, y);
  double J = F + spec.mu * norm(result.u, NormKind::L1);
  Field phi = solve_adjoint(spec, y);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    double s = opts.s0;
    Field candidate = result.u;
    Field candidate_y = y;
    double candidate_F = F;
    double diff_norm = 0.0;
    for (int tries = 0;; ++tries) {
      candidate = prox_box_l1(gradient_step(result.u, phi, s), s, spec.mu, spec.alpha, spec.beta);
      const Field d = candidate - result.u;
      diff_norm = norm(d, NormKind::L2);
      if (diff_norm == 0.0) break;
      candidate_y = solve_state(spec, candidate, opts.solver);
      candidate_F = tracking_cost(spec, candidate_y);
      const double model = F + inner_Q(phi, d) + diff_norm * diff_norm / (2.0 * s);
      const double candidate_J = candidate_F + spec.mu * norm(candidate, NormKind::L1);
      const bool upper_model = candidate_F <= model + 1e-14 * std::abs(F);
      const bool decrease = candidate_J <= J - opts.sufficient_decrease * diff_norm * diff_norm / s;
      if ((upper_model && decrease) || tries >= 60) break;
      s *= opts.backtrack;
    }

    const double residual = diff_norm / s;
    if (diff_norm > 0.0) {
      const double candidate_J = candidate_F + spec.mu * norm(candidate, NormKind::L1);
      if (candidate_J <= J) {
        result.u = std::move(candidate);
        y = std::move(candidate_y);
        F = candidate_F;
        J = candidate_J;
        phi = solve_adjoint(spec, y);
      }
    }
    result.trace.push_back({iter, J, residual, s});
    result.residual = residual;
    if (residual <= opts.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.cost = {F, norm(result.u, NormKind::L1), J};
  return result;
}

double stationarity_residual(const ProblemSpec& spec, const Field& u, const Field& phi, double s) {
  if (!(s > 0.0)) throw InvalidInput("stationarity_residual: step must be positive");
  const Field p = prox_box_l1(gradient_step(u, phi, s), s, spec.mu, spec.alpha, spec.beta);
  return norm(u - p, NormKind::L2);
}

double stationarity_residual(const ProblemSpec& spec, const Field& u, double s, const SolverOptions& opts) {
  return stationarity_residual(spec, u, riesz_gradient_F(spec, u, opts), s);
}

std::vector<OptimizeResult> multistart(const ProblemSpec& spec, int starts, const OptimizeOptions& opts,
                                       int workers) {
  if (starts < 1) throw InvalidInput("multistart: at least one start required");
  std::vector<OptimizeResult> results(starts, OptimizeResult{.u = Field::space_time(spec.grid)});
  for_each_index(static_cast<std::size_t>(starts), workers, [&](std::size_t i) {
    auto rng = sample_stream(opts.seed, i);
    Field r = random_field(spec.grid, rng);
    // Map [-1, 1] onto the box.
    const double mid = 0.5 * (spec.alpha + spec.beta), half = 0.5 * (spec.beta - spec.alpha);
    for (double& v : r.values()) v = mid + half * v;
    results[i] = proximal_gradient(spec, r, opts);
    results[i].seed = i;
  });
  std::ranges::stable_sort(results, [](const OptimizeResult& a, const OptimizeResult& b) {
    return a.cost.J != b.cost.J ? a.cost.J < b.cost.J : a.seed < b.seed;
  });
  return results;
}

}  // namespace sparse_ocp

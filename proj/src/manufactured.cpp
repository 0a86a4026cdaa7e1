#include "sparse_ocp/manufactured.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

StationaryInstance build_stationary_instance(const InstanceRecipe& recipe, const SolverOptions& opts) {
  const SpaceTimeGrid& g = recipe.grid;
  const double mu = recipe.mu;
  const double band = recipe.band >= 0.0 ? recipe.band : 0.05 * mu;
  if (!(recipe.alpha < recipe.beta)) throw InvalidInput("manufactured instance: alpha < beta required");
  if (mu < 0.0) throw InvalidInput("manufactured instance: mu must be >= 0");

  Field phi = evaluate_space_time(recipe.phi_bar, g);
  Field u = Field::space_time(g);
  std::vector<ConstructionLabel> labels(u.size(), ConstructionLabel::Free);

  if (mu > 0.0) {
    if (!(recipe.alpha < 0.0 && recipe.beta > 0.0))
      throw DegenerateInstance("manufactured instance: sparse structure needs alpha < 0 < beta");
    bool bang = false, sparse = false;
    for (double p : phi.values()) {
      bang = bang || std::abs(p) > mu + band;
      sparse = sparse || std::abs(p) < mu - band;
    }
    if (!bang || !sparse)
      throw DegenerateInstance("manufactured instance: adjoint recipe does not straddle +-mu");
  }

  auto ph = phi.values();
  auto uu = u.values();
  for (std::size_t i = 0; i < uu.size(); ++i) {
    const double p = ph[i];
    if (p > mu) {
      uu[i] = recipe.alpha;
      labels[i] = p > mu + band ? ConstructionLabel::Lower : ConstructionLabel::Band;
    } else if (p < -mu) {
      uu[i] = recipe.beta;
      labels[i] = p < -mu - band ? ConstructionLabel::Upper : ConstructionLabel::Band;
    } else if (mu > 0.0) {
      uu[i] = 0.0;
      labels[i] = std::abs(p) < mu - band ? ConstructionLabel::Sparse : ConstructionLabel::Band;
    } else {
      uu[i] = std::clamp(0.0, recipe.alpha, recipe.beta);
    }
  }

  ProblemSpec spec{
      .grid = g,
      .op = recipe.op,
      .f = recipe.f,
      .cost = {.y_d = Field::space_time(g), .nu_omega = recipe.nu_omega, .y_omega = std::nullopt},
      .alpha = recipe.alpha,
      .beta = recipe.beta,
      .mu = mu,
      .y0 = evaluate_slice(recipe.y0, g, 0.0),
  };
  Field y = solve_state(spec, u, opts);

  // y_d^k = y^k - (M_k^T phi^k - phi^{k+1}) / dt, phi^{nt+1} standing for the
  // terminal injection nu_Omega (y^nt - y_Omega).
  Field yd = Field::space_time(g);
  const std::size_t n = g.nodes();
  std::vector<double> shift(n), residual(n);
  for (int k = 1; k <= g.nt(); ++k) {
    auto yk = y.level(k);
    for (std::size_t i = 0; i < n; ++i) shift[i] = eval_f(spec.f, yk[i], 1);
    step_matrix(spec, shift).multiply_transposed(phi.level(k), residual);
    auto next = k < g.nt() ? phi.level(k + 1) : phi.level(k);
    const bool has_next = k < g.nt() || recipe.nu_omega == 1;
    auto ydk = yd.level(k);
    for (std::size_t i = 0; i < n; ++i)
      ydk[i] = yk[i] - (residual[i] - (has_next ? next[i] : 0.0)) / g.dt();
  }
  spec.cost.y_d = std::move(yd);
  if (recipe.nu_omega == 1) spec.cost.y_omega = y.terminal() - phi.terminal();

  return {std::move(spec), std::move(u), std::move(y), std::move(phi), std::move(labels), band};
}

}  // namespace sparse_ocp

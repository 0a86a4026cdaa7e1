#include "sparse_ocp/functional.hpp"

#include <cmath>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

double tracking_cost(const ProblemSpec& spec, const Field& y) {
  const Field diff = y - spec.cost.y_d;
  double F = 0.5 * inner_Q(diff, diff);
  if (spec.cost.nu_omega == 1) {
    const Field tdiff = y.terminal() - *spec.cost.y_omega;
    F += 0.5 * inner_Omega(tdiff, tdiff);
  }
  return F;
}

CostBreakdown eval_cost(const ProblemSpec& spec, const Field& u, const SolverOptions& opts) {
  CostBreakdown c;
  c.F = tracking_cost(spec, solve_state(spec, u, opts));
  c.j = norm(u, NormKind::L1);
  c.J = c.F + spec.mu * c.j;
  return c;
}

Field riesz_gradient_F(const ProblemSpec& spec, const Field& u, const SolverOptions& opts) {
  return solve_adjoint(spec, solve_state(spec, u, opts));
}

double dirderiv_j(const Field& u, const Field& v, double tol_u0) {
  if (!u.same_shape(v) || u.is_slice()) throw InvalidInput("dirderiv_j: shape mismatch");
  auto uu = u.values();
  auto vv = v.values();
  double s = 0.0;
  for (std::size_t i = 0; i < uu.size(); ++i) {
    if (uu[i] > tol_u0) s += vv[i];
    else if (uu[i] < -tol_u0) s -= vv[i];
    else s += std::abs(vv[i]);
  }
  return u.grid().node_volume() * u.grid().dt() * s;
}

double dirderiv_J(const Field& phi, double mu, const Field& u, const Field& v) {
  return inner_Q(phi, v) + mu * dirderiv_j(u, v);
}

double dirderiv_J(const ProblemSpec& spec, const Field& u, const Field& v, const SolverOptions& opts) {
  return dirderiv_J(riesz_gradient_F(spec, u, opts), spec.mu, u, v);
}

double hess_F_quadform(const ProblemSpec& spec, const Field& y, const Field& phi, const Field& z1,
                       const Field& z2) {
  auto yy = y.values();
  auto pp = phi.values();
  auto a = z1.values();
  auto b = z2.values();
  double s = 0.0;
  for (std::size_t i = 0; i < yy.size(); ++i)
    s += (eval_L(yy[i], 0.0, 2) - pp[i] * eval_f(spec.f, yy[i], 2)) * a[i] * b[i];
  double value = spec.grid.node_volume() * spec.grid.dt() * s;
  if (spec.cost.nu_omega == 1) value += inner_Omega(z1, z2);
  return value;
}

double hess_F_quadform(const ProblemSpec& spec, const Field& u, const Field& v1, const Field& v2,
                       const SolverOptions& opts) {
  const Field y = solve_state(spec, u, opts);
  const LinearizedSession session(spec, y);
  const Field phi = solve_adjoint(session, spec, y);
  return hess_F_quadform(spec, y, phi, session.forward(v1), session.forward(v2));
}

double state_metric_sq(const ProblemSpec& spec, const Field& z) {
  const double q = norm(z, NormKind::L2);
  double s = q * q;
  if (spec.cost.nu_omega == 1) {
    const double t = norm(z, NormKind::L2, Domain::OmegaT);
    s += t * t;
  }
  return s;
}

PointEvaluation::PointEvaluation(const ProblemSpec& spec, Field u, const SolverOptions& opts)
    : spec_(&spec),
      u_(std::move(u)),
      y_(solve_state(spec, u_, opts)),
      session_(spec, y_),
      phi_(solve_adjoint(session_, spec, y_)) {
  cost_.F = tracking_cost(spec, y_);
  cost_.j = norm(u_, NormKind::L1);
  cost_.J = cost_.F + spec.mu * cost_.j;
}

double PointEvaluation::dirderiv_J(const Field& v) const {
  return sparse_ocp::dirderiv_J(phi_, spec_->mu, u_, v);
}

double PointEvaluation::hess(const Field& z1, const Field& z2) const {
  return hess_F_quadform(*spec_, y_, phi_, z1, z2);
}

}  // namespace sparse_ocp

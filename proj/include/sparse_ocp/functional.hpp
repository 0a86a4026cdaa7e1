#pragma once

#include "sparse_ocp/pde.hpp"

namespace sparse_ocp {

struct CostBreakdown {
  double F = 0.0;  ///< tracking part
  double j = 0.0;  ///< L1(Q) norm of the control
  double J = 0.0;  ///< F + mu j
};

/// Tolerance for the set {u = 0} in the directional derivative of j.
inline constexpr double kZeroControlTol = 1e-12;

/// Tracking cost of a known state y_u.
double tracking_cost(const ProblemSpec& spec, const Field& y);

CostBreakdown eval_cost(const ProblemSpec& spec, const Field& u, const SolverOptions& opts = {});

/// Riesz representative of F'(u) with respect to inner_Q, i.e. the discrete
/// adjoint state phi_u.
Field riesz_gradient_F(const ProblemSpec& spec, const Field& u, const SolverOptions& opts = {});

/// j'(u; v) = int_{u>0} v + int_{u=0} |v| - int_{u<0} v.
double dirderiv_j(const Field& u, const Field& v, double tol_u0 = kZeroControlTol);

/// J'(u; v) = inner_Q(phi_u, v) + mu j'(u; v).
double dirderiv_J(const ProblemSpec& spec, const Field& u, const Field& v, const SolverOptions& opts = {});
/// Same with a known adjoint state.
double dirderiv_J(const Field& phi, double mu, const Field& u, const Field& v);

/// F''(u)(v1, v2) = inner_Q((1 - phi f''(y)) z1, z2) + nu_Omega <z1(T), z2(T)>.
double hess_F_quadform(const ProblemSpec& spec, const Field& u, const Field& v1, const Field& v2,
                       const SolverOptions& opts = {});
/// Quadratic form from precomputed state, adjoint and linearized states.
double hess_F_quadform(const ProblemSpec& spec, const Field& y, const Field& phi, const Field& z1,
                       const Field& z2);

/// ||z||^2_{L2(Q)} + nu_Omega ||z(T)||^2_{L2(Omega)}, the metric of the
/// coercivity and growth quotients.
double state_metric_sq(const ProblemSpec& spec, const Field& z);

/// State, adjoint and linearization factorizations at one control. The
/// session is read-only, so one evaluation may serve many directions.
class PointEvaluation {
 public:
  PointEvaluation(const ProblemSpec& spec, Field u, const SolverOptions& opts = {});

  const ProblemSpec& spec() const { return *spec_; }
  const Field& control() const { return u_; }
  const Field& state() const { return y_; }
  const Field& adjoint() const { return phi_; }
  const LinearizedSession& session() const { return session_; }
  const CostBreakdown& cost() const { return cost_; }

  Field linearized(const Field& v) const { return session_.forward(v); }
  double dirderiv_J(const Field& v) const;
  double hess(const Field& z1, const Field& z2) const;

 private:
  const ProblemSpec* spec_;
  Field u_;
  Field y_;
  LinearizedSession session_;
  Field phi_;
  CostBreakdown cost_;
};

}  // namespace sparse_ocp

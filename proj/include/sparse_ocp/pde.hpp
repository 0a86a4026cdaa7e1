#pragma once

#include <span>
#include <vector>

#include "sparse_ocp/banded.hpp"
#include "sparse_ocp/problem.hpp"

namespace sparse_ocp {

struct SolverOptions {
  double newton_tol = 1e-12;  ///< absolute max-norm residual per time step
  int newton_max_iter = 50;
};

/// Newton residual norms, one vector per time step.
struct NewtonHistory {
  std::vector<std::vector<double>> residuals;
};

/// Matrix of I + dt A_h + dt diag(shift) on the interior nodes. A_h is the
/// central-difference stencil of -div(a grad .) + b . grad with zero
/// Dirichlet data.
BandedMatrix step_matrix(const ProblemSpec& spec, std::span<const double> shift);

/// Implicit Euler for y_t + A y + f(y) = u:
///   (I + dt A_h) y^k + dt f(y^k) = y^{k-1} + dt u^k,  y^0 = y0,
/// each step solved by damped Newton.
Field solve_state(const ProblemSpec& spec, const Field& u, const SolverOptions& opts = {},
                  NewtonHistory* history = nullptr);

/// Factorizations of M_k = I + dt A_h + dt diag(f_y(y^k)), k = 1..nt, for a
/// fixed linearization point y. Forward sweeps give z_v; transposed sweeps
/// give the exact discrete adjoint of that map. Read-only after
/// construction.
class LinearizedSession {
 public:
  LinearizedSession(const ProblemSpec& spec, const Field& y);

  const SpaceTimeGrid& grid() const { return grid_; }

  /// M_k z^k = z^{k-1} + dt v^k, z^0 = 0.
  Field forward(const Field& v) const;

  /// M_k^T p^k = dt s^k + p^{k+1} with p^{nt+1} = terminal (either may be
  /// null, meaning zero).
  Field backward(const Field* source, const Field* terminal) const;

 private:
  SpaceTimeGrid grid_;
  std::vector<BandedLU> steps_;
};

/// z_v = G'(u) v, linearized at the given state y.
Field solve_linearized(const ProblemSpec& spec, const Field& y, const Field& v);

/// Discrete adjoint state: backward sweep with source dt (y^k - y_d^k) and
/// terminal injection nu_Omega (y^nt - y_Omega).
Field solve_adjoint(const ProblemSpec& spec, const Field& y);
Field solve_adjoint(const LinearizedSession& session, const ProblemSpec& spec, const Field& y);

/// Backward sweep without distributed source and prescribed terminal value.
/// Satisfies <terminal, z_v(T)>_Omega = inner_Q(v, psi).
Field solve_backward(const ProblemSpec& spec, const Field& y, const Field& terminal);

}  // namespace sparse_ocp

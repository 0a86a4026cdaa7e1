#include "sparse_ocp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

namespace {

struct StencilEntry {
  int dx, dy;
  double coeff;
};

std::vector<StencilEntry> operator_stencil(const ProblemSpec& spec) {
  const double h = spec.grid.h();
  const double h2 = h * h;
  const auto& op = spec.op;
  if (spec.grid.dim() == 1) {
    const double a = op.a[0], b = op.b[0];
    return {{0, 0, 2.0 * a / h2}, {1, 0, -a / h2 + b / (2.0 * h)}, {-1, 0, -a / h2 - b / (2.0 * h)}};
  }
  const double a00 = op.diffusion(0, 0), a11 = op.diffusion(1, 1), a01 = op.diffusion(0, 1);
  const double b0 = op.b[0], b1 = op.b[1];
  std::vector<StencilEntry> s = {
      {0, 0, 2.0 * (a00 + a11) / h2},
      {1, 0, -a00 / h2 + b0 / (2.0 * h)},
      {-1, 0, -a00 / h2 - b0 / (2.0 * h)},
      {0, 1, -a11 / h2 + b1 / (2.0 * h)},
      {0, -1, -a11 / h2 - b1 / (2.0 * h)},
  };
  if (a01 != 0.0) {
    // -2 a01 d_xy with d_xy = (NE - SE - NW + SW) / (4 h^2)
    const double c = a01 / (2.0 * h2);
    s.push_back({1, 1, -c});
    s.push_back({-1, -1, -c});
    s.push_back({1, -1, c});
    s.push_back({-1, 1, c});
  }
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_grid(const ProblemSpec& spec, const Field& f, const char* what, bool slice = false) {
  if (!(f.grid() == spec.grid) || f.is_slice() != slice)
    throw InvalidInput(std::string(what) + ": field does not match the problem grid");
  require_finite(f, what);
}

}  // namespace

BandedMatrix step_matrix(const ProblemSpec& spec, std::span<const double> shift) {
  const auto& g = spec.grid;
  const int nx = g.nx();
  const int n = static_cast<int>(g.nodes());
  const int band = g.dim() == 1 ? 1 : nx + 1;
  BandedMatrix m(n, band, band);
  const double dt = g.dt();
  const auto stencil = operator_stencil(spec);
  for (int node = 0; node < n; ++node) {
    const int i0 = node % nx, i1 = node / nx;
    m.add(node, node, 1.0 + dt * (shift.empty() ? 0.0 : shift[node]));
    for (const auto& e : stencil) {
      const int j0 = i0 + e.dx, j1 = i1 + e.dy;
      if (j0 < 0 || j0 >= nx) continue;
      if (g.dim() == 2 && (j1 < 0 || j1 >= nx)) continue;
      m.add(node, j0 + j1 * nx, dt * e.coeff);
    }
  }
  return m;
}

Field solve_state(const ProblemSpec& spec, const Field& u, const SolverOptions& opts,
                  NewtonHistory* history) {
  require_grid(spec, u, "solve_state: control");
  require_grid(spec, spec.y0, "solve_state: initial datum", true);
  const auto& g = spec.grid;
  const std::size_t n = g.nodes();
  const double dt = g.dt();
  const BandedMatrix base = step_matrix(spec, {});

  Field y = Field::space_time(g);
  std::vector<double> prev(spec.y0.values().begin(), spec.y0.values().end());
  std::vector<double> cur(n), residual(n), trial(n), trial_residual(n), shift(n), work(n);
  if (history) history->residuals.assign(g.nt(), {});

  auto compute_residual = [&](std::span<const double> yk, std::span<const double> uk,
                              std::span<double> out) {
    base.multiply(yk, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += dt * eval_f(spec.f, yk[i], 0) - prev[i] - dt * uk[i];
    return max_abs(out);
  };

  for (int k = 1; k <= g.nt(); ++k) {
    auto uk = u.level(k);
    cur = prev;
    double rnorm = compute_residual(cur, uk, residual);
    if (history) history->residuals[k - 1].push_back(rnorm);
    int iter = 0;
    while (rnorm > opts.newton_tol) {
      if (iter++ >= opts.newton_max_iter)
        throw NonConvergence("Newton did not converge at time step " + std::to_string(k) +
                                 " (residual " + std::to_string(rnorm) + ")",
                             k);
      for (std::size_t i = 0; i < n; ++i) shift[i] = eval_f(spec.f, cur[i], 1);
      const BandedLU jac(step_matrix(spec, shift));
      std::ranges::copy(residual, work.begin());
      jac.solve(work);

      // Damped update: halve the step while the residual grows.
      double step = 1.0;
      double trial_norm = 0.0;
      for (int halving = 0;; ++halving) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = cur[i] - step * work[i];
        try {
          trial_norm = compute_residual(trial, uk, trial_residual);
        } catch (const SaturationError&) {
          if (halving == 10) throw;
          step *= 0.5;
          continue;
        }
        if (trial_norm <= rnorm || halving == 10) break;
        step *= 0.5;
      }
      // Stagnation at roundoff level: the update no longer moves the iterate.
      const bool stalled = step * max_abs(work) <= 4e-16 * (1.0 + max_abs(cur)) &&
                           trial_norm <= 1e3 * opts.newton_tol;
      cur = trial;
      std::ranges::copy(trial_residual, residual.begin());
      rnorm = trial_norm;
      if (history) history->residuals[k - 1].push_back(rnorm);
      if (!std::isfinite(rnorm))
        throw NonConvergence("Newton diverged at time step " + std::to_string(k), k);
      if (stalled) break;
    }
    std::ranges::copy(cur, y.level(k).begin());
    prev = cur;
  }
  return y;
}

LinearizedSession::LinearizedSession(const ProblemSpec& spec, const Field& y) : grid_(spec.grid) {
  require_grid(spec, y, "linearization point");
  steps_.reserve(grid_.nt());
  std::vector<double> shift(grid_.nodes());
  for (int k = 1; k <= grid_.nt(); ++k) {
    auto yk = y.level(k);
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = eval_f(spec.f, yk[i], 1);
    steps_.emplace_back(step_matrix(spec, shift));
  }
}

Field LinearizedSession::forward(const Field& v) const {
  if (!(v.grid() == grid_) || v.is_slice()) throw InvalidInput("linearized solve: direction shape mismatch");
  Field z = Field::space_time(grid_);
  const double dt = grid_.dt();
  std::vector<double> rhs(grid_.nodes(), 0.0);
  for (int k = 1; k <= grid_.nt(); ++k) {
    auto vk = v.level(k);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * vk[i];
    steps_[k - 1].solve(rhs);
    std::ranges::copy(rhs, z.level(k).begin());
  }
  return z;
}

Field LinearizedSession::backward(const Field* source, const Field* terminal) const {
  if (source && (!(source->grid() == grid_) || source->is_slice()))
    throw InvalidInput("backward solve: source shape mismatch");
  if (terminal && !(terminal->grid() == grid_)) throw InvalidInput("backward solve: terminal grid mismatch");
  Field p = Field::space_time(grid_);
  const double dt = grid_.dt();
  std::vector<double> rhs(grid_.nodes(), 0.0);
  if (terminal) std::ranges::copy(terminal->last_level(), rhs.begin());
  for (int k = grid_.nt(); k >= 1; --k) {
    if (source) {
      auto sk = source->level(k);
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * sk[i];
    }
    steps_[k - 1].solve(rhs, true);
    std::ranges::copy(rhs, p.level(k).begin());
  }
  return p;
}

Field solve_linearized(const ProblemSpec& spec, const Field& y, const Field& v) {
  require_grid(spec, v, "solve_linearized: direction");
  return LinearizedSession(spec, y).forward(v);
}

Field solve_adjoint(const LinearizedSession& session, const ProblemSpec& spec, const Field& y) {
  Field source = y - spec.cost.y_d;
  if (spec.cost.nu_omega == 1) {
    Field terminal = y.terminal() - *spec.cost.y_omega;
    return session.backward(&source, &terminal);
  }
  return session.backward(&source, nullptr);
}

Field solve_adjoint(const ProblemSpec& spec, const Field& y) {
  return solve_adjoint(LinearizedSession(spec, y), spec, y);
}

Field solve_backward(const ProblemSpec& spec, const Field& y, const Field& terminal) {
  require_finite(terminal, "solve_backward: terminal");
  return LinearizedSession(spec, y).backward(nullptr, &terminal);
}

}  // namespace sparse_ocp

#include "sparse_ocp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

namespace {
constexpr double kExpLimit = 700.0;
constexpr int kScanPoints = 1001;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

OperatorA OperatorA::laplacian(int dim) {
  OperatorA op;
  op.a.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) op.a[static_cast<std::size_t>(i) * dim + i] = 1.0;
  op.b.assign(dim, 0.0);
  return op;
}

int OddPolynomial::degree() const {
  for (int m = static_cast<int>(coefficients.size()); m >= 1; --m)
    if (coefficients[m - 1] != 0.0) return m;
  return 0;
}

double eval_f(const Nonlinearity& f, double y, int order) {
  if (order < 0 || order > 2) throw InvalidInput("eval_f: order must be 0, 1 or 2");
  return std::visit(
      overloaded{
          [](const ZeroNonlinearity&) { return 0.0; },
          [&](const OddPolynomial& p) {
            // Horner over sum_{m >= max(order,1)} c_m m!/(m-order)! y^(m-order);
            // for order 0 the lowest power is y^1.
            const auto& c = p.coefficients;
            double result = 0.0;
            for (int m = static_cast<int>(c.size()); m >= std::max(order, 1); --m) {
              double factor = 1.0;
              for (int j = 0; j < order; ++j) factor *= m - j;
              result = result * y + c[m - 1] * factor;
            }
            if (order == 0) result *= y;
            return result;
          },
          [&](const Exponential& e) {
            if (y > kExpLimit) throw SaturationError("exponential nonlinearity overflow (y > 700)");
            return e.gain * std::exp(y);
          },
      },
      f);
}

double eval_L(double y, double target, int order) {
  if (order == 1) return y - target;
  if (order == 2) return 1.0;
  throw InvalidInput("eval_L: order must be 1 or 2");
}

ValidationReport validate(const ProblemSpec& spec) {
  ValidationReport r;
  const int d = spec.grid.dim();
  auto fail = [&](std::string msg) {
    r.passed = false;
    r.failures.push_back(std::move(msg));
  };

  if (spec.op.a.size() != static_cast<std::size_t>(d * d) || spec.op.b.size() != static_cast<std::size_t>(d)) {
    fail("operator: coefficient shapes do not match dimension");
  } else {
    if (d == 1) {
      r.lambda_min = spec.op.a[0];
    } else {
      const double a00 = spec.op.a[0], a01 = spec.op.a[1], a10 = spec.op.a[2], a11 = spec.op.a[3];
      if (std::abs(a01 - a10) > 1e-14 * (1.0 + std::abs(a01))) fail("operator: diffusion matrix not symmetric");
      const double mean = 0.5 * (a00 + a11);
      const double rad = std::hypot(0.5 * (a00 - a11), a01);
      r.lambda_min = mean - rad;
    }
    if (!(r.lambda_min > 0.0)) fail("operator: diffusion matrix not positive definite");
    for (int j = 0; j < d && r.lambda_min > 0.0; ++j) {
      const double pe = std::abs(spec.op.b[j]) * spec.grid.h() / spec.op.diffusion(j, j);
      r.max_mesh_peclet = std::max(r.max_mesh_peclet, pe);
    }
    if (r.max_mesh_peclet >= 2.0) r.warnings.push_back("operator: mesh Peclet number >= 2");
  }

  if (!(spec.alpha < spec.beta) || !std::isfinite(spec.alpha) || !std::isfinite(spec.beta))
    fail("bounds ordering: alpha < beta required");
  if (!(spec.mu >= 0.0) || !std::isfinite(spec.mu)) fail("sparsity weight mu must be >= 0");
  if (spec.cost.nu_omega != 0 && spec.cost.nu_omega != 1) fail("nu_omega must be 0 or 1");

  if (const auto* p = std::get_if<OddPolynomial>(&spec.f)) {
    const int deg = p->degree();
    if (deg % 2 == 0) fail("nonlinearity: polynomial degree must be odd");
    else if (p->coefficients[deg - 1] <= 0.0) fail("nonlinearity: leading coefficient must be positive");
  }
  if (const auto* e = std::get_if<Exponential>(&spec.f); e && !(e->gain >= 0.0))
    fail("nonlinearity: exponential gain must be >= 0");

  // Scan df/dy on [-M, M], M a crude a-priori state bound.
  double y0max = 0.0;
  for (double v : spec.y0.values()) y0max = std::max(y0max, std::abs(v));
  r.scan_bound = y0max + spec.grid.final_time() * std::max(std::abs(spec.alpha), std::abs(spec.beta)) + 1.0;
  if (std::holds_alternative<Exponential>(spec.f)) r.scan_bound = std::min(r.scan_bound, kExpLimit);
  r.min_fy_on_scan = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double y = -r.scan_bound + 2.0 * r.scan_bound * i / (kScanPoints - 1);
    r.min_fy_on_scan = std::min(r.min_fy_on_scan, eval_f(spec.f, y, 1));
  }
  if (!std::isfinite(r.min_fy_on_scan)) fail("nonlinearity: df/dy unbounded below on scan");

  const auto& g = spec.grid;
  if (!(spec.cost.y_d.grid() == g) || spec.cost.y_d.is_slice()) fail("cost: y_d must be a space-time field on the grid");
  else if (!spec.cost.y_d.all_finite()) fail("cost: y_d has non-finite entries");
  if (spec.cost.nu_omega == 1) {
    if (!spec.cost.y_omega) fail("cost: y_Omega required when nu_omega = 1");
    else if (!(spec.cost.y_omega->grid() == g) || !spec.cost.y_omega->is_slice())
      fail("cost: y_Omega must be a terminal slice on the grid");
    else if (!spec.cost.y_omega->all_finite()) fail("cost: y_Omega has non-finite entries");
  }
  if (!(spec.y0.grid() == g) || !spec.y0.is_slice()) fail("initial datum must be a terminal slice on the grid");
  else if (!spec.y0.all_finite()) fail("initial datum has non-finite entries");
  return r;
}

double FieldRecipe::operator()(std::span<const double> x, double t) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return value;
    case Kind::Sine: {
      double s = amplitude;
      for (double xj : x) s *= std::sin(mode * std::numbers::pi * xj);
      double p = 0.0;
      for (auto it = time_poly.rbegin(); it != time_poly.rend(); ++it) p = p * t + *it;
      return s * p;
    }
  }
  return 0.0;
}

namespace {
void fill_level(const FieldRecipe& r, const SpaceTimeGrid& g, double t, std::span<double> out) {
  double x[2] = {0.0, 0.0};
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    for (int j = 0; j < g.dim(); ++j) x[j] = g.coord(g.axis_index(n, j));
    out[n] = r(std::span<const double>(x, g.dim()), t);
  }
}
}  // namespace

Field evaluate_space_time(const FieldRecipe& r, const SpaceTimeGrid& grid) {
  Field f = Field::space_time(grid);
  for (int k = 1; k <= grid.nt(); ++k) fill_level(r, grid, grid.time(k), f.level(k));
  return f;
}

Field evaluate_slice(const FieldRecipe& r, const SpaceTimeGrid& grid, double t) {
  Field f = Field::terminal_slice(grid);
  fill_level(r, grid, t, f.level(1));
  return f;
}

}  // namespace sparse_ocp

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sparse_ocp/grid.hpp"

namespace sparse_ocp {

/// A y = -div(a grad y) + b . grad y with constant coefficients.
struct OperatorA {
  std::vector<double> a;  ///< d x d, row-major, symmetric positive definite
  std::vector<double> b;  ///< length d

  static OperatorA laplacian(int dim);
  double diffusion(int i, int j) const { return a[static_cast<std::size_t>(i) * b.size() + j]; }
};

struct ZeroNonlinearity {};

/// f(y) = sum_{m>=1} c_m y^m; coefficients[0] multiplies y.
struct OddPolynomial {
  std::vector<double> coefficients;
  int degree() const;
};

/// f(y) = gain * exp(y)
struct Exponential {
  double gain = 1.0;
};

using Nonlinearity = std::variant<ZeroNonlinearity, OddPolynomial, Exponential>;

/// Tracking integrands L = (y - y_d)^2 / 2 and L_Omega = (y - y_Omega)^2 / 2.
struct CostIntegrands {
  Field y_d;                      ///< space-time target
  int nu_omega = 0;               ///< 0 or 1
  std::optional<Field> y_omega;   ///< terminal target, required iff nu_omega == 1
};

struct ProblemSpec {
  SpaceTimeGrid grid;
  OperatorA op;
  Nonlinearity f;
  CostIntegrands cost;
  double alpha;
  double beta;
  double mu;
  Field y0;  ///< initial datum (terminal-slice shaped)
};

struct ValidationReport {
  bool passed = true;
  double lambda_min = 0.0;        ///< smallest eigenvalue of a
  double scan_bound = 0.0;        ///< M of the derivative scan on [-M, M]
  double min_fy_on_scan = 0.0;    ///< min of df/dy over the scan
  double max_mesh_peclet = 0.0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

ValidationReport validate(const ProblemSpec& spec);

/// f(y), df/dy or d2f/dy2 for order 0, 1, 2. Exponential throws
/// SaturationError for y > 700.
double eval_f(const Nonlinearity& f, double y, int order);

/// Tracking integrand derivatives: order 1 gives y - target, order 2 gives 1.
double eval_L(double y, double target, int order);

/// Closed-form nodal data: amplitude * prod_j sin(mode pi x_j) * p(t) with
/// p(t) = sum_i time_poly[i] t^i, or a constant.
struct FieldRecipe {
  enum class Kind { Zero, Constant, Sine };
  Kind kind = Kind::Zero;
  double value = 0.0;
  double amplitude = 1.0;
  int mode = 1;
  std::vector<double> time_poly{1.0};

  double operator()(std::span<const double> x, double t) const;
};

/// Evaluate on every interior node and time level 1..nt.
Field evaluate_space_time(const FieldRecipe& r, const SpaceTimeGrid& grid);
/// Evaluate on the interior nodes at time t.
Field evaluate_slice(const FieldRecipe& r, const SpaceTimeGrid& grid, double t);

}  // namespace sparse_ocp

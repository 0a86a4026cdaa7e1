#pragma once

#include <vector>

#include "sparse_ocp/pde.hpp"

namespace sparse_ocp {

/// Role of a node in a manufactured instance. Band marks nodes whose adjoint
/// value lies within `band` of a switching threshold.
enum class ConstructionLabel { Lower, Upper, Sparse, Free, Band };

struct StationaryInstance {
  ProblemSpec spec;
  Field u_bar;
  Field y_bar;
  Field phi_bar;
  std::vector<ConstructionLabel> labels;
  double band = 0.0;
};

struct InstanceRecipe {
  SpaceTimeGrid grid;
  OperatorA op;
  Nonlinearity f;
  double mu = 0.0;
  double alpha = -1.0;
  double beta = 1.0;
  int nu_omega = 0;
  FieldRecipe phi_bar;  ///< closed-form adjoint state
  FieldRecipe y0;       ///< initial datum, evaluated at t = 0
  double band = -1.0;   ///< label band half-width; negative means 0.05 mu
};

/// Builds a problem for which the given phi_bar is the adjoint state of a
/// control u_bar satisfying the discrete first-order system exactly:
/// u_bar is the pointwise minimizer of phi_bar p + mu |p| over [alpha, beta],
/// y_bar its state, y_d = y_bar - R(phi_bar)/dt with R the discrete backward
/// residual, and y_Omega = y_bar(T) - phi_bar(T) when nu_Omega = 1.
/// Throws DegenerateInstance when mu > 0 and phi_bar does not reach both
/// sides of the band around mu, or when 0 is not inside (alpha, beta).
StationaryInstance build_stationary_instance(const InstanceRecipe& recipe, const SolverOptions& opts = {});

}  // namespace sparse_ocp

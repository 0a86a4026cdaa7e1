#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparse_ocp/functional.hpp"

namespace sparse_ocp {

// ---------------------------------------------------------------------------
// Point classification and multiplier
// ---------------------------------------------------------------------------

enum class PointLabel { AtLowerStrict, AtUpperStrict, SparseZero, BiactiveMinus, BiactivePlus, Free };
inline constexpr std::size_t kPointLabelCount = 6;
const char* to_string(PointLabel label);

struct Classification {
  std::vector<PointLabel> labels;
  std::array<std::size_t, kPointLabelCount> counts{};
  /// Strict nodes whose control contradicts the switching structure.
  std::size_t violations = 0;
  std::vector<std::size_t> violating_nodes;

  std::size_t count(PointLabel l) const { return counts[static_cast<std::size_t>(l)]; }
};

/// Default band half-width 1e-6 (||phi||_inf + mu).
double default_band(const Field& phi_bar, double mu);

/// Labels every node:
///   AtLowerStrict  phi >  mu + band         (requires u = alpha)
///   AtUpperStrict  phi < -mu - band         (requires u = beta)
///   SparseZero     |phi| < mu - band, mu>0  (requires u = 0)
///   BiactiveMinus  |phi + mu| <= band, u = 0, mu > 0
///   BiactivePlus   |phi - mu| <= band, u = 0, mu > 0
///   Free           otherwise
Classification classify(const Field& u_bar, const Field& phi_bar, double mu, double band, double tol_active,
                        double alpha, double beta);

/// lambda = proj_[-1,1](-phi / mu); throws UndefinedMultiplier for mu = 0.
Field multiplier_lambda(const Field& phi_bar, double mu);

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

enum class ConeKind { C, Dtau, Etau, Gtau, Ctau };
const char* to_string(ConeKind kind);

struct ConeQuery {
  ConeKind kind = ConeKind::C;
  double tau = 0.0;
  double tol_active = 1e-10;  ///< |u - alpha| <= tol_active counts as active
  /// Relative slack on J'(u; v): J' <= tau N(z) + tol_J (||phi||_inf + mu) ||v||_L1.
  double tol_J = 2e-6;
  double band = -1.0;         ///< negative means default_band
};

struct ConeMembership {
  bool member = true;
  double sign_violation = 0.0;        ///< quadrature mass of sign-condition violations
  double structural_violation = 0.0;  ///< mass of violated zero/sign structure
  /// tau N(z) + slack - J'(u; v) for derivative-based cones, +inf otherwise.
  double derivative_slack = std::numeric_limits<double>::infinity();
  double dirderiv = 0.0;
};

/// Sign condition: v >= -1e-12 where u = alpha and v <= 1e-12 where u = beta.
ConeMembership satisfies_sign(const Field& v, const Field& u_bar, double tol_active, double alpha, double beta);

/// Cone machinery at a stationary control. Holds the state, the adjoint and
/// the factorized linearization, and is read-only afterwards, so one analyzer
/// serves concurrent sampling workers.
class ConeAnalyzer {
 public:
  /// phi_bar defaults to the adjoint state of u_bar.
  ConeAnalyzer(const ProblemSpec& spec, const Field& u_bar, std::optional<Field> phi_bar = std::nullopt,
               const SolverOptions& opts = {});

  const ProblemSpec& spec() const { return point_.spec(); }
  const PointEvaluation& point() const { return point_; }
  const Field& u_bar() const { return point_.control(); }
  const Field& y_bar() const { return point_.state(); }
  const Field& phi_bar() const { return phi_bar_; }
  double band(const ConeQuery& q) const { return q.band >= 0.0 ? q.band : default_band(phi_bar_, spec().mu); }

  /// J'(u_bar; v) with the analyzer's phi_bar.
  double dirderiv(const Field& v) const;

  ConeMembership membership(const Field& v, const ConeQuery& q) const;
  /// Same, reusing z_v.
  ConeMembership membership(const Field& v, const Field& z, const ConeQuery& q) const;

  /// Structural clauses of C (threshold = band) or D^tau (threshold = max(tau, band)).
  double structural_violation(const Field& v, double threshold, const ConeQuery& q) const;

  /// Zeroes v where the structure of D^threshold forces zero and rectifies
  /// signs on active and biactive nodes.
  void project_structure(Field& v, double threshold, const ConeQuery& q) const;

 private:
  PointEvaluation point_;
  Field phi_bar_;
  double phi_scale_;
};

/// Convenience wrapper building a throwaway analyzer.
ConeMembership cone_membership(const ProblemSpec& spec, const Field& u_bar, const Field& phi_bar, const Field& v,
                               const ConeQuery& q);

struct ConeSamples {
  std::vector<Field> samples;
  std::vector<std::size_t> ids;  ///< campaign index of each sample
  std::size_t attempts = 0;
  double acceptance_rate = 0.0;
  bool empty_warning = false;
};

/// Draws n nonzero members of the queried cone by structure projection of
/// random fields followed by a membership rejection test (up to 100 draws
/// per slot). The first draw of a slot projects with the cone's own
/// threshold; later draws use a level log-uniform between the smallest
/// node distance to the switching set and that threshold, taper v linearly
/// in that distance and orient it against phi_bar on nodes with u_bar = 0.
/// Deterministic in (seed, slot).
ConeSamples sample_critical_cone(const ConeAnalyzer& cones, const ConeQuery& q, std::size_t n, std::uint64_t seed,
                                 int workers = 1);

// ---------------------------------------------------------------------------
// Second-order reports
// ---------------------------------------------------------------------------

struct CoercivitySample {
  std::size_t id;
  double hessian;      ///< F''(u_bar) v^2
  double metric;       ///< ||z_v||^2 + nu ||z_v(T)||^2
  double ratio;
};

struct CoercivityReport {
  std::size_t samples = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  bool vacuous = false;            ///< cone sampling produced no nonzero direction
  double acceptance_rate = 0.0;
  std::vector<CoercivitySample> rows;
  std::optional<Field> violating;  ///< direction with negative ratio, if any
};

CoercivityReport ssc_report(const ConeAnalyzer& cones, const ConeQuery& q, std::size_t n, std::uint64_t seed,
                            int workers = 1);

struct GrowthSample {
  std::size_t id;
  double rho;
  double state_dist_inf;  ///< ||y_u - y_bar||_inf
  double cost_gap;        ///< J(u) - J(u_bar)
  double metric;          ///< ||y_u - y_bar||^2 + nu ||.(T)||^2
  double kappa;
};

struct GrowthReport {
  std::size_t samples = 0;  ///< retained samples
  std::size_t attempts = 0;
  double epsilon = 0.0;
  double min_kappa = std::numeric_limits<double>::infinity();
  std::size_t counterexamples = 0;
  std::vector<GrowthSample> rows;
  std::optional<Field> counterexample;
};

/// Samples u = clamp(u_bar + rho r), keeps ||y_u - y_bar||_inf < epsilon and
/// ||u - u_bar||_L2 >= 1e-8, until n samples are retained (at most 20 n
/// draws). Throws NoRetainedSamples when nothing is kept.
GrowthReport growth_report(const ConeAnalyzer& cones, double epsilon, std::size_t n, std::uint64_t seed,
                           const std::vector<double>& rho_grid, int workers = 1);

struct SupEstimate {
  double sup = 0.0;
  double sup_first_half = 0.0;
  bool finite = true;
  /// Relative growth of the running sup over the second half of the samples.
  double relative_growth() const { return sup > 0.0 ? (sup - sup_first_half) / sup : 0.0; }
};

struct BoundsSample {
  std::size_t id;
  double ratio_l2, ratio_l1, ratio_inf;
  double duality_error;
};

struct NearSample {
  std::size_t id;
  double rho;
  double state_dist_inf;
  double z_inf;
  double z_metric;      ///< ||z||_L2 + nu ||z(T)||_L2
  double state_metric;  ///< ||y_u - y_bar||_L2 + nu ||.(T)||_L2
  bool below_premise;
  bool holds_linf;
  bool holds_l2;
};

struct BoundsReport {
  SupEstimate c_q2, c_q1, c_qinf;  ///< linearized-map constants
  SupEstimate lipschitz;           ///< ||y_u - y_bar||_inf / ||u - u_bar||_L2
  SupEstimate m2;                  ///< |F''(u) v^2| / metric(z_v)
  double max_duality_error = 0.0;  ///< <sign z(T), z(T)> vs inner_Q(v, psi)
  std::size_t psi_bound_violations = 0;
  double c_f = 0.0;                ///< max |f'|, |f''| over the observed state range
  double premise_linf = std::numeric_limits<double>::infinity();
  double premise_l2 = std::numeric_limits<double>::infinity();
  std::size_t below_premise = 0;
  std::size_t violations_linf = 0;
  std::size_t violations_l2 = 0;
  std::vector<BoundsSample> rows;
  std::vector<NearSample> near_rows;
};

/// Empirical constants of the linearized-state estimates over n random
/// admissible (u, v), and the near-u_bar estimates on n perturbations of
/// u_bar with relative radius drawn from near_rho.
BoundsReport bounds_report(const ConeAnalyzer& cones, std::size_t n, std::uint64_t seed,
                           const std::vector<double>& near_rho, int workers = 1);

// ---------------------------------------------------------------------------
// Cone invariants
// ---------------------------------------------------------------------------

struct InclusionCheck {
  double tau = 0.0;
  double tau_prime = 0.0;
  std::size_t samples = 0;
  std::size_t exceptions = 0;
  double acceptance_rate = 0.0;
  std::vector<std::size_t> exception_ids;
};

/// tau' = tau / sqrt(|Omega|_h max(1, T)).
double inclusion_tau_prime(const SpaceTimeGrid& grid, double tau);

/// Samples n members of G^{tau'} and checks each is a member of E^tau.
InclusionCheck check_inclusion(const ConeAnalyzer& cones, double tau, std::size_t n, std::uint64_t seed,
                               int workers = 1, const ConeQuery& base = {});

struct NestingCheck {
  std::size_t samples = 0;
  std::size_t c_members = 0;            ///< nonzero members of C
  std::size_t nesting_exceptions = 0;   ///< C member outside D, G or E
  std::size_t ctau_exceptions = 0;      ///< C^tau member outside D^tau or G^tau
  std::size_t scaling_exceptions = 0;   ///< v and c v disagree on some cone
};

/// Nesting and scaling invariants on n sign-condition directions (a mix of
/// raw, C-projected and D^tau-projected draws).
NestingCheck check_nesting(const ConeAnalyzer& cones, double tau, std::size_t n, std::uint64_t seed,
                           int workers = 1, const ConeQuery& base = {});

struct CharacterizationCheck {
  std::size_t samples = 0;
  std::size_t disagreements = 0;
  std::size_t disagreements_outside_band = 0;
  double band_mass = 0.0;  ///< quadrature mass of band nodes
};

/// Compares |J'(u_bar; v)| <= slack with the structural description of C on
/// n sign-condition directions.
CharacterizationCheck check_characterization(const ConeAnalyzer& cones, std::size_t n, std::uint64_t seed,
                                             int workers = 1, const ConeQuery& base = {});

}  // namespace sparse_ocp

#include "sparse_ocp/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_ocp/error.hpp"
#include "sparse_ocp/parallel.hpp"
#include "sparse_ocp/random_fields.hpp"

namespace sparse_ocp {

namespace {
constexpr double kSignTol = 1e-12;
constexpr double kZeroTol = 1e-12;
constexpr int kDrawsPerSlot = 100;

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double weight(const SpaceTimeGrid& g) { return g.node_volume() * g.dt(); }
}  // namespace

const char* to_string(PointLabel label) {
  switch (label) {
    case PointLabel::AtLowerStrict: return "at_lower_strict";
    case PointLabel::AtUpperStrict: return "at_upper_strict";
    case PointLabel::SparseZero: return "sparse_zero";
    case PointLabel::BiactiveMinus: return "biactive_minus";
    case PointLabel::BiactivePlus: return "biactive_plus";
    case PointLabel::Free: return "free";
  }
  return "?";
}

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::C: return "C";
    case ConeKind::Dtau: return "Dtau";
    case ConeKind::Etau: return "Etau";
    case ConeKind::Gtau: return "Gtau";
    case ConeKind::Ctau: return "Ctau";
  }
  return "?";
}

double default_band(const Field& phi_bar, double mu) { return 1e-6 * (max_abs(phi_bar) + mu); }

Classification classify(const Field& u_bar, const Field& phi_bar, double mu, double band, double tol_active,
                        double alpha, double beta) {
  if (!u_bar.same_shape(phi_bar)) throw InvalidInput("classify: shape mismatch");
  if (mu < 0.0) throw InvalidInput("classify: mu must be >= 0");
  if (!(band > 0.0)) throw InvalidInput("classify: band half-width must be positive");
  Classification c;
  auto u = u_bar.values();
  auto p = phi_bar.values();
  c.labels.resize(u.size(), PointLabel::Free);
  for (std::size_t i = 0; i < u.size(); ++i) {
    PointLabel l = PointLabel::Free;
    bool ok = true;
    if (p[i] > mu + band) {
      l = PointLabel::AtLowerStrict;
      ok = std::abs(u[i] - alpha) <= tol_active;
    } else if (p[i] < -mu - band) {
      l = PointLabel::AtUpperStrict;
      ok = std::abs(u[i] - beta) <= tol_active;
    } else if (mu > 0.0 && std::abs(p[i]) < mu - band) {
      l = PointLabel::SparseZero;
      ok = std::abs(u[i]) <= tol_active;
    } else if (mu > 0.0 && std::abs(u[i]) <= tol_active && std::abs(p[i] + mu) <= band) {
      l = PointLabel::BiactiveMinus;
    } else if (mu > 0.0 && std::abs(u[i]) <= tol_active && std::abs(p[i] - mu) <= band) {
      l = PointLabel::BiactivePlus;
    }
    c.labels[i] = l;
    ++c.counts[static_cast<std::size_t>(l)];
    if (!ok) {
      ++c.violations;
      c.violating_nodes.push_back(i);
    }
  }
  return c;
}

Field multiplier_lambda(const Field& phi_bar, double mu) {
  if (!(mu > 0.0)) throw UndefinedMultiplier("multiplier_lambda: mu must be positive");
  Field lambda = phi_bar;
  for (double& v : lambda.values()) v = std::clamp(-v / mu, -1.0, 1.0);
  return lambda;
}

ConeMembership satisfies_sign(const Field& v, const Field& u_bar, double tol_active, double alpha, double beta) {
  if (!v.same_shape(u_bar)) throw InvalidInput("satisfies_sign: shape mismatch");
  auto vv = v.values();
  auto u = u_bar.values();
  double mass = 0.0;
  for (std::size_t i = 0; i < vv.size(); ++i) {
    if (std::abs(u[i] - alpha) <= tol_active && vv[i] < -kSignTol) mass += -vv[i];
    if (std::abs(u[i] - beta) <= tol_active && vv[i] > kSignTol) mass += vv[i];
  }
  ConeMembership m;
  m.sign_violation = mass * weight(v.grid());
  m.member = mass == 0.0;
  return m;
}

ConeAnalyzer::ConeAnalyzer(const ProblemSpec& spec, const Field& u_bar, std::optional<Field> phi_bar,
                           const SolverOptions& opts)
    : point_(spec, u_bar, opts), phi_bar_(phi_bar ? std::move(*phi_bar) : point_.adjoint()) {
  if (!phi_bar_.same_shape(u_bar)) throw InvalidInput("ConeAnalyzer: phi_bar shape mismatch");
  phi_scale_ = max_abs(phi_bar_) + spec.mu;
}

double ConeAnalyzer::dirderiv(const Field& v) const { return dirderiv_J(phi_bar_, spec().mu, u_bar(), v); }

double ConeAnalyzer::structural_violation(const Field& v, double threshold, const ConeQuery& q) const {
  const double mu = spec().mu;
  const double eb = band(q);
  auto vv = v.values();
  auto u = u_bar().values();
  auto p = phi_bar_.values();
  double mass = 0.0;
  for (std::size_t i = 0; i < vv.size(); ++i) {
    const double dist = mu > 0.0 ? std::abs(std::abs(p[i]) - mu) : std::abs(p[i]);
    if (dist > threshold) {
      if (std::abs(vv[i]) > kZeroTol) mass += std::abs(vv[i]);
      continue;
    }
    if (mu > 0.0 && std::abs(u[i]) <= q.tol_active) {
      if (std::abs(p[i] + mu) <= eb && vv[i] < -kSignTol) mass += -vv[i];
      if (std::abs(p[i] - mu) <= eb && vv[i] > kSignTol) mass += vv[i];
    }
  }
  return mass * weight(v.grid());
}

void ConeAnalyzer::project_structure(Field& v, double threshold, const ConeQuery& q) const {
  const double mu = spec().mu;
  const double eb = band(q);
  const double alpha = spec().alpha, beta = spec().beta;
  auto vv = v.values();
  auto u = u_bar().values();
  auto p = phi_bar_.values();
  for (std::size_t i = 0; i < vv.size(); ++i) {
    const double dist = mu > 0.0 ? std::abs(std::abs(p[i]) - mu) : std::abs(p[i]);
    if (dist > threshold) {
      vv[i] = 0.0;
      continue;
    }
    if (mu > 0.0 && std::abs(u[i]) <= q.tol_active) {
      if (std::abs(p[i] + mu) <= eb) vv[i] = std::abs(vv[i]);
      if (std::abs(p[i] - mu) <= eb) vv[i] = -std::abs(vv[i]);
    }
    if (std::abs(u[i] - alpha) <= q.tol_active) vv[i] = std::abs(vv[i]);
    if (std::abs(u[i] - beta) <= q.tol_active) vv[i] = -std::abs(vv[i]);
  }
}

ConeMembership ConeAnalyzer::membership(const Field& v, const ConeQuery& q) const {
  ConeMembership m = satisfies_sign(v, u_bar(), q.tol_active, spec().alpha, spec().beta);
  if (!m.member) return m;
  if (q.kind == ConeKind::C || q.kind == ConeKind::Dtau) return membership(v, Field::space_time(v.grid()), q);
  return membership(v, point_.linearized(v), q);
}

ConeMembership ConeAnalyzer::membership(const Field& v, const Field& z, const ConeQuery& q) const {
  if (q.kind != ConeKind::C && !(q.tau > 0.0)) throw InvalidInput("cone membership: tau must be positive");
  ConeMembership m = satisfies_sign(v, u_bar(), q.tol_active, spec().alpha, spec().beta);
  if (!m.member) return m;
  const double eb = band(q);
  const ProblemSpec& s = spec();
  const bool nu = s.cost.nu_omega == 1;

  if (q.kind == ConeKind::C) m.structural_violation = structural_violation(v, eb, q);
  if (q.kind == ConeKind::Dtau || q.kind == ConeKind::Ctau)
    m.structural_violation = structural_violation(v, std::max(q.tau, eb), q);

  if (q.kind == ConeKind::Etau || q.kind == ConeKind::Gtau || q.kind == ConeKind::Ctau) {
    double size = 0.0;
    if (q.kind == ConeKind::Etau) {
      size = norm(z, NormKind::L2) + (nu ? norm(z, NormKind::L2, Domain::OmegaT) : 0.0);
    } else {
      size = norm(z, NormKind::L1) + (nu ? norm(z, NormKind::L1, Domain::OmegaT) : 0.0);
    }
    m.dirderiv = dirderiv(v);
    const double slack = q.tol_J * phi_scale_ * norm(v, NormKind::L1);
    m.derivative_slack = q.tau * size + slack - m.dirderiv;
  }
  m.member = m.sign_violation == 0.0 && m.structural_violation == 0.0 && m.derivative_slack >= 0.0;
  return m;
}

ConeMembership cone_membership(const ProblemSpec& spec, const Field& u_bar, const Field& phi_bar, const Field& v,
                               const ConeQuery& q) {
  return ConeAnalyzer(spec, u_bar, phi_bar).membership(v, q);
}

// ---------------------------------------------------------------------------

namespace {

double proposal_threshold(const ConeAnalyzer& cones, const ConeQuery& q) {
  const double eb = cones.band(q);
  return q.kind == ConeKind::C ? eb : std::max(q.tau, eb);
}

}  // namespace

ConeSamples sample_critical_cone(const ConeAnalyzer& cones, const ConeQuery& q, std::size_t n, std::uint64_t seed,
                                 int workers) {
  if (n < 1) throw InvalidInput("sample_critical_cone: n must be >= 1");
  std::vector<std::optional<Field>> slots(n);
  std::vector<std::size_t> draws(n, 0);
  const double threshold = proposal_threshold(cones, q);
  const SpaceTimeGrid& g = cones.spec().grid;

  // Distance of each node to the switching set and the smallest one.
  const double mu = cones.spec().mu;
  std::vector<double> dist(cones.phi_bar().size());
  double nearest = threshold;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double p = cones.phi_bar()[k];
    dist[k] = mu > 0.0 ? std::abs(std::abs(p) - mu) : std::abs(p);
    nearest = std::min(nearest, dist[k]);
  }
  nearest = std::max(nearest, cones.band(q));

  for_each_index(n, workers, [&](std::size_t i) {
    auto rng = sample_stream(seed, i);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < kDrawsPerSlot; ++t) {
      Field v = random_field(g, rng);
      if (t > 0 && nearest < threshold) {
        // Later draws concentrate on nodes close to the switching set.
        const double level = nearest * std::pow(threshold / nearest, unit(rng));
        for (std::size_t k = 0; k < dist.size(); ++k) {
          v[k] *= std::max(0.0, 1.0 - dist[k] / (2.0 * level));
          // Near-biactive nodes: only the sign -sign(phi) keeps J' small.
          if (mu > 0.0 && std::abs(cones.u_bar()[k]) <= q.tol_active)
            v[k] = -std::copysign(std::abs(v[k]), cones.phi_bar()[k]);
        }
        cones.project_structure(v, level, q);
      } else {
        cones.project_structure(v, threshold, q);
      }
      ++draws[i];
      if (norm(v, NormKind::Linf) == 0.0) continue;
      if (cones.membership(v, q).member) {
        slots[i] = std::move(v);
        break;
      }
    }
  });

  ConeSamples out;
  for (std::size_t i = 0; i < n; ++i) {
    out.attempts += draws[i];
    if (slots[i]) {
      out.samples.push_back(std::move(*slots[i]));
      out.ids.push_back(i);
    }
  }
  out.acceptance_rate = static_cast<double>(out.samples.size()) / static_cast<double>(out.attempts);
  out.empty_warning = out.samples.empty();
  return out;
}

CoercivityReport ssc_report(const ConeAnalyzer& cones, const ConeQuery& q, std::size_t n, std::uint64_t seed,
                            int workers) {
  CoercivityReport report;
  ConeSamples drawn = sample_critical_cone(cones, q, n, seed, workers);
  report.acceptance_rate = drawn.acceptance_rate;
  std::vector<std::optional<CoercivitySample>> rows(drawn.samples.size());
  for_each_index(drawn.samples.size(), workers, [&](std::size_t i) {
    const Field z = cones.point().linearized(drawn.samples[i]);
    const double metric = state_metric_sq(cones.spec(), z);
    if (!(metric > 0.0)) return;
    const double hess = cones.point().hess(z, z);
    rows[i] = CoercivitySample{drawn.ids[i], hess, metric, hess / metric};
  });
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    report.rows.push_back(*rows[i]);
    if (rows[i]->ratio < report.min_ratio) {
      report.min_ratio = rows[i]->ratio;
      report.argmin = rows[i]->id;
      best = i;
    }
  }
  report.samples = report.rows.size();
  report.vacuous = report.samples == 0;
  if (!report.vacuous && report.min_ratio < 0.0) report.violating = drawn.samples[best];
  return report;
}

GrowthReport growth_report(const ConeAnalyzer& cones, double epsilon, std::size_t n, std::uint64_t seed,
                           const std::vector<double>& rho_grid, int workers) {
  if (!(epsilon > 0.0)) throw InvalidInput("growth_report: epsilon must be positive");
  if (rho_grid.empty()) throw InvalidInput("growth_report: empty rho grid");
  const ProblemSpec& spec = cones.spec();
  const Field& u_bar = cones.u_bar();
  const Field& y_bar = cones.y_bar();
  const double J_bar = cones.point().cost().J;
  const double tol = 1e-10 * std::max(1.0, std::abs(J_bar));

  GrowthReport report;
  report.epsilon = epsilon;
  const std::size_t max_draws = 20 * n;
  std::size_t kept_best = 0;
  double worst_gap = 0.0;
  while (report.samples < n && report.attempts < max_draws) {
    const std::size_t batch = std::min(n, max_draws - report.attempts);
    const std::size_t base = report.attempts;
    std::vector<std::optional<GrowthSample>> rows(batch);
    for_each_index(batch, workers, [&](std::size_t b) {
      const std::size_t id = base + b;
      auto rng = sample_stream(seed, id);
      const double rho = rho_grid[id % rho_grid.size()];
      Field u = u_bar;
      u.axpy(rho, random_field(spec.grid, rng));
      for (double& x : u.values()) x = std::clamp(x, spec.alpha, spec.beta);
      if (norm(u - u_bar, NormKind::L2) < 1e-8) return;
      const Field y = solve_state(spec, u);
      const Field dy = y - y_bar;
      const double dist = norm(dy, NormKind::Linf);
      if (!(dist < epsilon)) return;
      const double J = tracking_cost(spec, y) + spec.mu * norm(u, NormKind::L1);
      const double metric = state_metric_sq(spec, dy);
      const double gap = J - J_bar;
      rows[b] = GrowthSample{id, rho, dist, gap, metric, metric > 0.0 ? 2.0 * gap / metric : 0.0};
    });
    report.attempts += batch;
    for (auto& r : rows) {
      if (!r || report.samples >= n) continue;
      report.rows.push_back(*r);
      ++report.samples;
      if (r->metric > 0.0) report.min_kappa = std::min(report.min_kappa, r->kappa);
      if (r->cost_gap < -tol) {
        ++report.counterexamples;
        if (r->cost_gap < worst_gap) {
          worst_gap = r->cost_gap;
          kept_best = r->id;
        }
      }
    }
  }
  if (report.samples == 0)
    throw NoRetainedSamples("growth_report: no sample with ||y_u - y_bar||_inf < epsilon; widen epsilon or shrink rho");
  if (report.counterexamples > 0) {
    auto rng = sample_stream(seed, kept_best);
    Field u = u_bar;
    u.axpy(rho_grid[kept_best % rho_grid.size()], random_field(spec.grid, rng));
    for (double& x : u.values()) x = std::clamp(x, spec.alpha, spec.beta);
    report.counterexample = std::move(u);
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

void update_sup(SupEstimate& e, double value, bool first_half) {
  if (!std::isfinite(value)) e.finite = false;
  e.sup = std::max(e.sup, value);
  if (first_half) e.sup_first_half = std::max(e.sup_first_half, value);
}

Field random_admissible(const ProblemSpec& spec, std::mt19937_64& rng) {
  Field u = random_field(spec.grid, rng);
  const double mid = 0.5 * (spec.alpha + spec.beta), half = 0.5 * (spec.beta - spec.alpha);
  for (double& x : u.values()) x = std::clamp(mid + half * x, spec.alpha, spec.beta);
  return u;
}

double f_bound(const Nonlinearity& f, double M) {
  constexpr int kPoints = 1001;
  double c = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double y = -M + 2.0 * M * i / (kPoints - 1);
    c = std::max({c, std::abs(eval_f(f, y, 1)), std::abs(eval_f(f, y, 2))});
  }
  return c;
}

}  // namespace

BoundsReport bounds_report(const ConeAnalyzer& cones, std::size_t n, std::uint64_t seed,
                           const std::vector<double>& near_rho, int workers) {
  if (n < 1) throw InvalidInput("bounds_report: n must be >= 1");
  if (near_rho.empty()) throw InvalidInput("bounds_report: empty near-rho grid");
  const ProblemSpec& spec = cones.spec();
  const bool nu = spec.cost.nu_omega == 1;
  BoundsReport report;

  // Part 1: linearized-map constants at random admissible controls.
  struct Raw {
    double l2 = 0, l1 = 0, inf = 0, m2 = 0, duality = 0, y_inf = 0;
    bool psi_ok = true;
    bool valid = false;
  };
  std::vector<Raw> raw(n);
  for_each_index(n, workers, [&](std::size_t i) {
    auto rng = sample_stream(seed, i);
    const Field u = random_admissible(spec, rng);
    // Slot 0 probes the constant direction, which maximizes the Linf gain
    // of positive solution operators.
    Field v = i == 0 ? Field::space_time(spec.grid, 1.0) : random_field(spec.grid, rng);
    if (norm(v, NormKind::Linf) == 0.0) return;
    const PointEvaluation at(spec, u);
    const Field z = at.linearized(v);
    Raw r;
    r.valid = true;
    r.y_inf = norm(at.state(), NormKind::Linf);
    r.l2 = (norm(z, NormKind::L2) + norm(z, NormKind::L2, Domain::OmegaT)) / norm(v, NormKind::L2);
    r.l1 = (norm(z, NormKind::L1) + norm(z, NormKind::L1, Domain::OmegaT)) / norm(v, NormKind::L1);
    r.inf = norm(z, NormKind::Linf) / norm(v, NormKind::Linf);
    const double metric = state_metric_sq(spec, z);
    r.m2 = metric > 0.0 ? std::abs(at.hess(z, z)) / metric : 0.0;

    // L1 terminal estimate through the backward problem with psi(T) = sign z(T).
    Field sign = z.terminal();
    for (double& s : sign.values()) s = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
    const Field psi = at.session().backward(nullptr, &sign);
    const double lhs = inner_Omega(sign, z);
    const double rhs = inner_Q(v, psi);
    r.duality = std::abs(lhs - rhs) / std::max(1e-300, std::abs(lhs) + std::abs(rhs));
    const double terminal_l1 = norm(z, NormKind::L1, Domain::OmegaT);
    r.psi_ok = terminal_l1 <= norm(psi, NormKind::Linf) * norm(v, NormKind::L1) * (1.0 + 1e-12) + 1e-300;
    raw[i] = r;
  });
  double y_max = norm(cones.y_bar(), NormKind::Linf);
  for (std::size_t i = 0; i < n; ++i) {
    const Raw& r = raw[i];
    if (!r.valid) continue;
    const bool first = i < (n + 1) / 2;
    update_sup(report.c_q2, r.l2, first);
    update_sup(report.c_q1, r.l1, first);
    update_sup(report.c_qinf, r.inf, first);
    update_sup(report.m2, r.m2, first);
    report.max_duality_error = std::max(report.max_duality_error, r.duality);
    if (!r.psi_ok) ++report.psi_bound_violations;
    y_max = std::max(y_max, r.y_inf);
    report.rows.push_back({i, r.l2, r.l1, r.inf, r.duality});
  }

  // Part 2: perturbations of u_bar.
  const Field& u_bar = cones.u_bar();
  const Field& y_bar = cones.y_bar();
  const double width = spec.beta - spec.alpha;
  std::vector<NearSample> near(n);
  std::vector<double> near_lip(n), near_yinf(n);
  for_each_index(n, workers, [&](std::size_t i) {
    auto rng = sample_stream(seed ^ 0x9e3779b97f4a7c15ull, i);
    const double rho = near_rho[i % near_rho.size()] * width;
    Field u = u_bar;
    u.axpy(rho, random_field(spec.grid, rng));
    for (double& x : u.values()) x = std::clamp(x, spec.alpha, spec.beta);
    const Field du = u - u_bar;
    const Field y = solve_state(spec, u);
    const Field dy = y - y_bar;
    const Field z = cones.point().linearized(du);
    NearSample s{};
    s.id = i;
    s.rho = rho;
    s.state_dist_inf = norm(dy, NormKind::Linf);
    s.z_inf = norm(z, NormKind::Linf);
    s.z_metric = norm(z, NormKind::L2) + (nu ? norm(z, NormKind::L2, Domain::OmegaT) : 0.0);
    s.state_metric = norm(dy, NormKind::L2) + (nu ? norm(dy, NormKind::L2, Domain::OmegaT) : 0.0);
    near[i] = s;
    const double du_l2 = norm(du, NormKind::L2);
    near_lip[i] = du_l2 > 0.0 ? s.state_dist_inf / du_l2 : 0.0;
    near_yinf[i] = norm(y, NormKind::Linf);
  });
  for (std::size_t i = 0; i < n; ++i) {
    update_sup(report.lipschitz, near_lip[i], i < (n + 1) / 2);
    y_max = std::max(y_max, near_yinf[i]);
  }

  report.c_f = f_bound(spec.f, y_max);
  const double c_inf = std::max(report.c_qinf.sup, 1e-300);
  if (report.c_f > 0.0) {
    report.premise_linf = 2.0 / (report.c_f * c_inf);
    report.premise_l2 = 1.0 / (report.c_f * std::max(c_inf, report.c_q2.sup));
  }
  for (NearSample& s : near) {
    if (s.state_dist_inf == 0.0) continue;
    const bool in_linf = s.state_dist_inf < report.premise_linf;
    const bool in_l2 = s.state_dist_inf < report.premise_l2;
    s.below_premise = in_linf && in_l2;
    s.holds_linf = s.z_inf < 2.0 * s.state_dist_inf;
    s.holds_l2 = s.z_metric >= 0.5 * s.state_metric;
    if (s.below_premise) ++report.below_premise;
    if (in_linf && !s.holds_linf) ++report.violations_linf;
    if (in_l2 && !s.holds_l2) ++report.violations_l2;
    report.near_rows.push_back(s);
  }
  return report;
}

// ---------------------------------------------------------------------------

double inclusion_tau_prime(const SpaceTimeGrid& grid, double tau) {
  return tau / std::sqrt(grid.omega_measure() * std::max(1.0, grid.final_time()));
}

InclusionCheck check_inclusion(const ConeAnalyzer& cones, double tau, std::size_t n, std::uint64_t seed,
                               int workers, const ConeQuery& base) {
  InclusionCheck out;
  out.tau = tau;
  out.tau_prime = inclusion_tau_prime(cones.spec().grid, tau);
  ConeQuery g = base;
  g.kind = ConeKind::Gtau;
  g.tau = out.tau_prime;
  ConeQuery e = base;
  e.kind = ConeKind::Etau;
  e.tau = tau;

  ConeSamples drawn = sample_critical_cone(cones, g, n, seed, workers);
  out.acceptance_rate = drawn.acceptance_rate;
  out.samples = drawn.samples.size();
  std::vector<char> ok(drawn.samples.size(), 1);
  for_each_index(drawn.samples.size(), workers, [&](std::size_t i) {
    const Field z = cones.point().linearized(drawn.samples[i]);
    ok[i] = cones.membership(drawn.samples[i], z, e).member ? 1 : 0;
  });
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (!ok[i]) {
      ++out.exceptions;
      out.exception_ids.push_back(drawn.ids[i]);
    }
  return out;
}

NestingCheck check_nesting(const ConeAnalyzer& cones, double tau, std::size_t n, std::uint64_t seed, int workers,
                           const ConeQuery& base) {
  struct Verdict {
    bool c = false;
    bool nesting_bad = false, ctau_bad = false, scaling_bad = false;
  };
  std::vector<Verdict> verdicts(n);
  const ConeKind kinds[] = {ConeKind::C, ConeKind::Dtau, ConeKind::Etau, ConeKind::Gtau, ConeKind::Ctau};
  for_each_index(n, workers, [&](std::size_t i) {
    auto rng = sample_stream(seed, i);
    Field v = random_field(cones.spec().grid, rng);
    ConeQuery q = base;
    q.tau = tau;
    // Draw mix: C-projected, D^tau-projected, and sign-rectified only.
    const double threshold = i % 3 == 0 ? cones.band(q) : (i % 3 == 1 ? std::max(tau, cones.band(q)) : HUGE_VAL);
    cones.project_structure(v, threshold, q);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    const double c = scale(rng);
    Field cv = c * v;
    const Field z = cones.point().linearized(v);
    const Field cz = cones.point().linearized(cv);

    bool member[5], scaled[5];
    for (int k = 0; k < 5; ++k) {
      q.kind = kinds[k];
      member[k] = cones.membership(v, z, q).member;
      scaled[k] = cones.membership(cv, cz, q).member;
    }
    Verdict& out = verdicts[i];
    out.c = member[0] && norm(v, NormKind::Linf) > 0.0;
    out.nesting_bad = member[0] && !(member[1] && member[2] && member[3]);
    out.ctau_bad = member[4] && !(member[1] && member[3]);
    for (int k = 0; k < 5; ++k) out.scaling_bad = out.scaling_bad || member[k] != scaled[k];
  });
  NestingCheck out;
  out.samples = n;
  for (const Verdict& v : verdicts) {
    out.c_members += v.c;
    out.nesting_exceptions += v.nesting_bad;
    out.ctau_exceptions += v.ctau_bad;
    out.scaling_exceptions += v.scaling_bad;
  }
  return out;
}

CharacterizationCheck check_characterization(const ConeAnalyzer& cones, std::size_t n, std::uint64_t seed,
                                             int workers, const ConeQuery& base) {
  ConeQuery q = base;
  q.kind = ConeKind::C;
  const double eb = cones.band(q);
  const ProblemSpec& spec = cones.spec();
  const double scale = norm(cones.phi_bar(), NormKind::Linf) + spec.mu;

  // Nodes within a wide band of the switching thresholds.
  std::vector<char> near_band(cones.phi_bar().size(), 0);
  CharacterizationCheck out;
  {
    auto p = cones.phi_bar().values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double dist = spec.mu > 0.0 ? std::abs(std::abs(p[i]) - spec.mu) : std::abs(p[i]);
      near_band[i] = dist <= 10.0 * eb;
      if (near_band[i]) out.band_mass += weight(spec.grid);
    }
  }

  std::vector<int> verdict(n, 0);  // 0 agree, 1 disagree in band, 2 disagree outside
  for_each_index(n, workers, [&](std::size_t i) {
    auto rng = sample_stream(seed, i);
    Field v = random_field(spec.grid, rng);
    cones.project_structure(v, i % 2 == 0 ? eb : HUGE_VAL, q);
    const bool structural = cones.structural_violation(v, eb, q) == 0.0;
    const double slack = q.tol_J * scale * norm(v, NormKind::L1);
    const bool critical = std::abs(cones.dirderiv(v)) <= slack;
    if (structural == critical) return;
    bool touches_band = false;
    auto vv = v.values();
    for (std::size_t k = 0; k < vv.size() && !touches_band; ++k) touches_band = near_band[k] && vv[k] != 0.0;
    verdict[i] = touches_band ? 1 : 2;
  });
  out.samples = n;
  for (int v : verdict) {
    out.disagreements += v != 0;
    out.disagreements_outside_band += v == 2;
  }
  return out;
}

}  // namespace sparse_ocp

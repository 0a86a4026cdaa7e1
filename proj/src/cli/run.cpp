#include "sparse_ocp/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sparse_ocp/field_io.hpp"

namespace sparse_ocp {

namespace {

constexpr double kMultiplierTol = 1e-8;
constexpr double kFocResidualTol = 1e-6;
constexpr double kDualityTol = 1e-10;
constexpr double kDisagreementRate = 0.01;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const char* x) { return x; }
  static std::string cell(const std::string& x) { return x; }
  std::ofstream out_;
};

class Summary {
 public:
  void line(const std::string& key, const std::string& value) { text_ << key << " = " << value << '\n'; }
  void line(const std::string& key, double value) { line(key, num(value)); }
  void line(const std::string& key, std::size_t value) { line(key, std::to_string(value)); }
  void section(const std::string& name) { text_ << "[" << name << "]\n"; }
  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text_.str();
  }

 private:
  std::ostringstream text_;
};

struct Stationary {
  Field u;
  std::optional<Field> phi;  ///< construction adjoint of a manufactured instance
  std::string origin;
};

Stationary stationary_point(const RunConfig& cfg, int workers) {
  if (cfg.instance) return {cfg.instance->u_bar, cfg.instance->phi_bar, "manufactured"};
  const auto results = cfg.starts > 1 ? multistart(cfg.spec, cfg.starts, cfg.optimizer, workers)
                                      : std::vector<OptimizeResult>{proximal_gradient(
                                            cfg.spec, Field::space_time(cfg.spec.grid), cfg.optimizer)};
  return {results.front().u, std::nullopt, "proximal_gradient"};
}

ConeQuery base_query(const RunConfig& cfg) {
  ConeQuery q;
  q.tol_active = cfg.cones.tol_active;
  q.tol_J = cfg.cones.tol_J;
  q.band = cfg.cones.band;
  return q;
}

void dump_point(const std::filesystem::path& dir, const ConeAnalyzer& cones) {
  write_csv(cones.u_bar(), (dir / "u_bar.csv").string());
  write_csv(cones.y_bar(), (dir / "y_bar.csv").string());
  write_csv(cones.phi_bar(), (dir / "phi_bar.csv").string());
}

int run_solve(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  std::vector<OptimizeResult> results;
  if (cfg.starts > 1) {
    results = multistart(cfg.spec, cfg.starts, cfg.optimizer, opts.workers);
  } else {
    results.push_back(proximal_gradient(cfg.spec, Field::space_time(cfg.spec.grid), cfg.optimizer));
  }
  const OptimizeResult& best = results.front();

  CsvWriter trace(dir / "trace.csv", "iter,J,residual,step");
  for (const TraceRow& r : best.trace) trace.row(r.iter, r.J, r.residual, r.step);
  CsvWriter report(dir / "report.csv", "rank,start,J,F,j,residual,converged,iterations");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const OptimizeResult& r = results[i];
    report.row(i, static_cast<std::size_t>(r.seed), r.cost.J, r.cost.F, r.cost.j, r.residual, r.converged,
               r.trace.size());
  }

  s.line("starts", static_cast<std::size_t>(results.size()));
  s.line("final_J", best.cost.J);
  s.line("final_F", best.cost.F);
  s.line("final_j", best.cost.j);
  s.line("residual", best.residual);
  s.line("stop_tol", cfg.optimizer.stop_tol);
  s.line("iterations", best.trace.size());
  s.line("converged", best.converged ? "yes" : "no");
  if (cfg.starts > 1) s.line("note", "best of several local runs; not certified global");
  if (opts.dump_fields) {
    const PointEvaluation at(cfg.spec, best.u, cfg.solver);
    write_csv(at.control(), (dir / "u.csv").string());
    write_csv(at.state(), (dir / "y.csv").string());
    write_csv(at.adjoint(), (dir / "phi.csv").string());
  }
  return best.converged ? kExitPass : kExitCounterexample;
}

int run_verify_foc(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  const Stationary st = stationary_point(cfg, opts.workers);
  const ProblemSpec& spec = cfg.spec;
  const PointEvaluation at(spec, st.u, cfg.solver);
  const Field& phi = at.adjoint();
  const double band = cfg.cones.band >= 0.0 ? cfg.cones.band : default_band(phi, spec.mu);
  const Classification c = classify(st.u, phi, spec.mu, band, cfg.cones.tol_active, spec.alpha, spec.beta);
  const double residual = stationarity_residual(spec, st.u, phi, 1.0);

  std::size_t multiplier_violations = 0;
  std::optional<Field> lambda;
  if (spec.mu > 0.0) {
    lambda = multiplier_lambda(phi, spec.mu);
    auto l = lambda->values();
    auto u = st.u.values();
    for (std::size_t i = 0; i < l.size(); ++i) {
      bool bad = std::abs(l[i]) > 1.0;
      if (u[i] > cfg.cones.tol_active) bad = bad || std::abs(l[i] - 1.0) > kMultiplierTol;
      if (u[i] < -cfg.cones.tol_active) bad = bad || std::abs(l[i] + 1.0) > kMultiplierTol;
      multiplier_violations += bad;
    }
  }

  std::size_t label_mismatches = 0, compared = 0;
  if (cfg.instance) {
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
      const ConstructionLabel built = cfg.instance->labels[i];
      if (built == ConstructionLabel::Band || built == ConstructionLabel::Free) continue;
      const PointLabel want = built == ConstructionLabel::Lower   ? PointLabel::AtLowerStrict
                              : built == ConstructionLabel::Upper ? PointLabel::AtUpperStrict
                                                                  : PointLabel::SparseZero;
      ++compared;
      label_mismatches += c.labels[i] != want;
    }
  }

  std::vector<char> violating(c.labels.size(), 0);
  for (std::size_t i : c.violating_nodes) violating[i] = 1;
  const std::size_t nodes = spec.grid.nodes();
  CsvWriter report(dir / "report.csv", "k,node,u,phi,label,violation");
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    report.row(static_cast<int>(i / nodes) + 1, i % nodes, st.u[i], phi[i], to_string(c.labels[i]),
               violating[i] != 0);

  s.line("point", st.origin);
  s.line("band", band);
  for (std::size_t l = 0; l < kPointLabelCount; ++l)
    s.line(std::string("count_") + to_string(static_cast<PointLabel>(l)), c.counts[l]);
  s.line("classification_violations", c.violations);
  s.line("stationarity_residual", residual);
  s.line("stationarity_tol", kFocResidualTol);
  if (lambda) s.line("multiplier_violations", multiplier_violations);
  if (cfg.instance) {
    s.line("construction_labels_compared", compared);
    s.line("construction_label_mismatches", label_mismatches);
  }
  if (opts.dump_fields) {
    write_csv(st.u, (dir / "u_bar.csv").string());
    write_csv(at.state(), (dir / "y_bar.csv").string());
    write_csv(phi, (dir / "phi_bar.csv").string());
    if (lambda) write_csv(*lambda, (dir / "lambda_bar.csv").string());
  }
  const bool pass = c.violations == 0 && multiplier_violations == 0 && residual <= kFocResidualTol &&
                    label_mismatches <= compared / 100;
  return pass ? kExitPass : kExitCounterexample;
}

int run_verify_soc(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  const Stationary st = stationary_point(cfg, opts.workers);
  const ConeAnalyzer cones(cfg.spec, st.u, st.phi, cfg.solver);
  bool pass = true;
  CsvWriter report(dir / "report.csv", "tau,id,hessian,metric,ratio");
  s.line("point", st.origin);
  s.line("threshold", cfg.cones.min_ratio);
  for (std::size_t t = 0; t < cfg.cones.tau.size(); ++t) {
    ConeQuery q = base_query(cfg);
    q.kind = ConeKind::Ctau;
    q.tau = cfg.cones.tau[t];
    const CoercivityReport r = ssc_report(cones, q, cfg.cones.samples, cfg.seed, opts.workers);
    for (const CoercivitySample& row : r.rows) report.row(q.tau, row.id, row.hessian, row.metric, row.ratio);
    s.section("tau " + num(q.tau));
    s.line("samples", r.samples);
    s.line("acceptance_rate", r.acceptance_rate);
    if (r.vacuous) {
      s.line("verdict", "vacuous (no nonzero cone direction sampled)");
      continue;
    }
    s.line("min_ratio", r.min_ratio);
    s.line("argmin", r.argmin);
    const bool ok = r.min_ratio >= cfg.cones.min_ratio;
    s.line("verdict", ok ? "coercive on samples" : "counterexample");
    if (!ok) {
      pass = false;
      if (r.violating) {
        const std::string name = "violating_direction_tau" + std::to_string(t) + ".csv";
        write_csv(*r.violating, (dir / name).string());
        s.line("violating_direction", name);
      }
    }
  }
  if (opts.dump_fields) dump_point(dir, cones);
  return pass ? kExitPass : kExitCounterexample;
}

int run_growth(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  const Stationary st = stationary_point(cfg, opts.workers);
  const ConeAnalyzer cones(cfg.spec, st.u, st.phi, cfg.solver);
  const GrowthReport r =
      growth_report(cones, cfg.growth.epsilon, cfg.growth.samples, cfg.seed, cfg.growth.rho, opts.workers);
  CsvWriter report(dir / "report.csv", "id,rho,state_dist_inf,cost_gap,metric,kappa");
  for (const GrowthSample& g : r.rows) report.row(g.id, g.rho, g.state_dist_inf, g.cost_gap, g.metric, g.kappa);
  s.line("point", st.origin);
  s.line("J_bar", cones.point().cost().J);
  s.line("epsilon", r.epsilon);
  s.line("samples", r.samples);
  s.line("attempts", r.attempts);
  s.line("min_kappa", r.min_kappa);
  s.line("counterexamples", r.counterexamples);
  if (r.counterexample) {
    write_csv(*r.counterexample, (dir / "counterexample_control.csv").string());
    s.line("counterexample_control", "counterexample_control.csv");
  }
  if (opts.dump_fields) dump_point(dir, cones);
  const bool pass = r.counterexamples == 0 && r.min_kappa > 0.0;
  s.line("verdict", pass ? "quadratic growth on samples" : "counterexample");
  return pass ? kExitPass : kExitCounterexample;
}

int run_bounds(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  const Stationary st = stationary_point(cfg, opts.workers);
  const ConeAnalyzer cones(cfg.spec, st.u, st.phi, cfg.solver);
  const BoundsReport r = bounds_report(cones, cfg.bounds.samples, cfg.seed, cfg.bounds.near_rho, opts.workers);

  CsvWriter report(dir / "report.csv",
                   "part,id,rho,ratio_l2,ratio_l1,ratio_inf,duality_error,state_dist_inf,z_inf,z_metric,"
                   "state_metric,below_premise,holds_linf,holds_l2");
  for (const BoundsSample& b : r.rows)
    report.row("linear", b.id, "", b.ratio_l2, b.ratio_l1, b.ratio_inf, b.duality_error, "", "", "", "", "", "",
               "");
  for (const NearSample& n : r.near_rows)
    report.row("near", n.id, n.rho, "", "", "", "", n.state_dist_inf, n.z_inf, n.z_metric, n.state_metric,
               n.below_premise, n.holds_linf, n.holds_l2);

  bool pass = true;
  auto constant = [&](const char* name, const SupEstimate& e) {
    const bool stable = e.finite && e.relative_growth() <= cfg.bounds.stabilized;
    s.line(std::string(name), e.sup);
    s.line(std::string(name) + "_relative_growth", e.relative_growth());
    pass = pass && stable;
  };
  s.line("point", st.origin);
  constant("C_Q2", r.c_q2);
  constant("C_Q1", r.c_q1);
  constant("C_Qinf", r.c_qinf);
  constant("lipschitz", r.lipschitz);
  constant("M2", r.m2);
  s.line("max_duality_error", r.max_duality_error);
  s.line("psi_bound_violations", r.psi_bound_violations);
  s.line("C_f", r.c_f);
  s.line("premise_linf", r.premise_linf);
  s.line("premise_l2", r.premise_l2);
  s.line("below_premise", r.below_premise);
  s.line("violations_linf_upper", r.violations_linf);
  s.line("violations_l2_lower", r.violations_l2);
  pass = pass && r.max_duality_error <= kDualityTol && r.psi_bound_violations == 0 && r.violations_linf == 0 &&
         r.violations_l2 == 0;
  s.line("verdict", pass ? "estimates hold on samples" : "failed");
  if (opts.dump_fields) dump_point(dir, cones);
  return pass ? kExitPass : kExitCounterexample;
}

int run_cones(const RunConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir, Summary& s) {
  const Stationary st = stationary_point(cfg, opts.workers);
  const ConeAnalyzer cones(cfg.spec, st.u, st.phi, cfg.solver);
  const ConeQuery base = base_query(cfg);
  const std::size_t n = cfg.cones.samples;
  CsvWriter report(dir / "report.csv", "tau,check,samples,exceptions,detail");
  s.line("point", st.origin);
  bool pass = true;

  const CharacterizationCheck ch = check_characterization(cones, n, cfg.seed, opts.workers, base);
  report.row(0.0, "characterization", ch.samples, ch.disagreements_outside_band, ch.disagreements);
  s.section("characterization");
  s.line("samples", ch.samples);
  s.line("disagreements", ch.disagreements);
  s.line("disagreements_outside_band", ch.disagreements_outside_band);
  s.line("band_mass", ch.band_mass);
  pass = pass && ch.disagreements_outside_band == 0 &&
         static_cast<double>(ch.disagreements) <= kDisagreementRate * static_cast<double>(ch.samples);

  for (double tau : cfg.cones.tau) {
    const NestingCheck nest = check_nesting(cones, tau, n, cfg.seed, opts.workers, base);
    const InclusionCheck inc = check_inclusion(cones, tau, n, cfg.seed, opts.workers, base);
    ConeQuery q = base;
    q.kind = ConeKind::Ctau;
    q.tau = tau;
    const ConeSamples cs = sample_critical_cone(cones, q, n, cfg.seed, opts.workers);
    report.row(tau, "nesting", nest.samples, nest.nesting_exceptions, nest.c_members);
    report.row(tau, "ctau_subset", nest.samples, nest.ctau_exceptions, 0);
    report.row(tau, "scaling", nest.samples, nest.scaling_exceptions, 0);
    report.row(tau, "inclusion", inc.samples, inc.exceptions, inc.acceptance_rate);
    report.row(tau, "ctau_sampling", cs.samples.size(), 0, cs.acceptance_rate);
    s.section("tau " + num(tau));
    s.line("C_members", nest.c_members);
    s.line("nesting_exceptions", nest.nesting_exceptions);
    s.line("ctau_exceptions", nest.ctau_exceptions);
    s.line("scaling_exceptions", nest.scaling_exceptions);
    s.line("inclusion_tau_prime", inc.tau_prime);
    s.line("inclusion_samples", inc.samples);
    s.line("inclusion_exceptions", inc.exceptions);
    s.line("ctau_acceptance_rate", cs.acceptance_rate);
    if (cs.empty_warning) s.line("warning", "no nonzero C^tau sample accepted; the cone may be {0}");
    pass = pass && nest.nesting_exceptions == 0 && nest.ctau_exceptions == 0 && nest.scaling_exceptions == 0 &&
           inc.exceptions == 0;
  }
  if (opts.dump_fields) dump_point(dir, cones);
  s.line("verdict", pass ? "all invariants hold" : "invariant exceptions");
  return pass ? kExitPass : kExitCounterexample;
}

}  // namespace

int run_pipeline(const RunConfig& cfg, const RunOptions& opts) {
  const std::filesystem::path dir = opts.out_dir;
  std::filesystem::create_directories(dir);
  Summary s;
  s.line("mode", to_string(cfg.mode));
  s.line("seed", static_cast<std::size_t>(cfg.seed));
  for (const std::string& w : cfg.warnings) s.line("warning", w);
  int code = kExitError;
  switch (cfg.mode) {
    case Mode::Solve: code = run_solve(cfg, opts, dir, s); break;
    case Mode::VerifyFoc: code = run_verify_foc(cfg, opts, dir, s); break;
    case Mode::VerifySoc: code = run_verify_soc(cfg, opts, dir, s); break;
    case Mode::Growth: code = run_growth(cfg, opts, dir, s); break;
    case Mode::Bounds: code = run_bounds(cfg, opts, dir, s); break;
    case Mode::Cones: code = run_cones(cfg, opts, dir, s); break;
  }
  s.section("result");
  s.line("status", code == kExitPass ? "pass" : "counterexample");
  s.write(dir / "summary.txt");
  return code;
}

int run(const std::string& config_path, const RunOptions& opts) {
  try {
    return run_pipeline(load_config(config_path), opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace sparse_ocp

// Acceptance suite: one PASS/FAIL line per numbered check; exit status is the
// number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "sparse_ocp/config.hpp"
#include "sparse_ocp/run.hpp"
#include "support.hpp"

using namespace sparse_ocp;
using namespace testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double tracking(const ProblemSpec& spec, const Field& u) { return tracking_cost(spec, solve_state(spec, u)); }

// 1. Discrete adjoint duality on 20 random instances.
Outcome adjoint_duality() {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    auto rng = sample_stream(101, i);
    const int dim = i % 2 == 0 ? 1 : 2;
    const SpaceTimeGrid g = dim == 1 ? SpaceTimeGrid(1, 30, 20, 1.0) : SpaceTimeGrid(2, 10, 12, 0.5);
    const Nonlinearity f = i % 3 == 0   ? Nonlinearity{ZeroNonlinearity{}}
                           : i % 3 == 1 ? Nonlinearity{OddPolynomial{{1.0, 0.0, 1.0}}}
                                        : Nonlinearity{Exponential{0.5}};
    const int nu = (i / 2) % 2;
    const ProblemSpec spec = random_spec(g, f, nu, rng);
    const Field u = scaled_random(g, rng, 1.0);
    const Field v = scaled_random(g, rng, 1.0);
    const Field y = solve_state(spec, u);
    const Field z = solve_linearized(spec, y, v);
    const Field phi = solve_adjoint(spec, y);
    double lhs = inner_Q(z, y - spec.cost.y_d);
    if (nu == 1) lhs += inner_Omega(z.terminal(), y.terminal() - *spec.cost.y_omega);
    const double rhs = inner_Q(v, phi);
    const double scale = std::max(std::abs(lhs), norm(v, NormKind::L2) * norm(phi, NormKind::L2));
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return {worst <= 1e-10, fmt("max relative duality error %.3e (tol 1e-10)", worst)};
}

// 2. Central differences of F against inner_Q(phi, v).
Outcome gradient_fd() {
  double worst = 0.0;
  const double eps = 1e-5;
  for (int i = 0; i < 15; ++i) {
    auto rng = sample_stream(202, i);
    const SpaceTimeGrid g = i % 3 == 2 ? SpaceTimeGrid(2, 8, 10, 0.5) : SpaceTimeGrid(1, 30, 20, 1.0);
    const Nonlinearity f = i % 2 == 0 ? Nonlinearity{cubic()} : Nonlinearity{Exponential{0.5}};
    const ProblemSpec spec = random_spec(g, f, i % 2, rng);
    const Field u = scaled_random(g, rng, 1.0);
    const Field v = scaled_random(g, rng, 1.0);
    Field up = u, um = u;
    up.axpy(eps, v);
    um.axpy(-eps, v);
    const double fd = (tracking(spec, up) - tracking(spec, um)) / (2 * eps);
    const double exact = inner_Q(riesz_gradient_F(spec, u), v);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  return {worst <= 1e-6, fmt("max relative error %.3e at eps 1e-5 (tol 1e-6)", worst)};
}

// 3. Second-order Taylor remainder.
Outcome taylor_second_order() {
  double worst = 1e300;
  const std::vector<double> eps{1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
  for (int i = 0; i < 5; ++i) {
    auto rng = sample_stream(303, i);
    const SpaceTimeGrid g = i == 4 ? SpaceTimeGrid(2, 8, 10, 0.5) : SpaceTimeGrid(1, 30, 20, 1.0);
    const Nonlinearity f = i % 2 == 0 ? Nonlinearity{cubic()} : Nonlinearity{Exponential{1.0}};
    const ProblemSpec spec = random_spec(g, f, i % 2, rng);
    const Field u = scaled_random(g, rng, 1.0);
    const Field v = scaled_random(g, rng, 1.0);
    const double F0 = tracking(spec, u);
    const double d1 = inner_Q(riesz_gradient_F(spec, u), v);
    const double d2 = hess_F_quadform(spec, u, v, v);
    std::vector<double> rem;
    for (double e : eps) {
      Field ue = u;
      ue.axpy(e, v);
      rem.push_back(std::abs(tracking(spec, ue) - F0 - e * d1 - 0.5 * e * e * d2));
    }
    worst = std::min(worst, observed_order(eps, rem));
  }
  return {worst >= 2.7, fmt("min observed order %.3f (need >= 2.7)", worst)};
}

// 4. Manufactured solutions for y_t - y_xx + y^3 = u.
double mms_error(int nx, int nt, int time_power) {
  const SpaceTimeGrid g(1, nx, nt, 1.0);
  const ProblemSpec spec = make_spec(g, cubic(), -100.0, 100.0, 0.0);
  const double pi = std::acos(-1.0);
  Field u = Field::space_time(g);
  auto exact = [&](double x, double t) { return std::pow(t, time_power) * std::sin(pi * x); };
  for (int k = 1; k <= nt; ++k)
    for (int i = 0; i < nx; ++i) {
      const double x = g.coord(i), t = g.time(k), s = std::sin(pi * x);
      const double tp = std::pow(t, time_power);
      const double dt_term = time_power * std::pow(t, time_power - 1) * s;
      u.at(k, i) = dt_term + pi * pi * tp * s + std::pow(tp * s, 3);
    }
  const Field y = solve_state(spec, u);
  double err = 0.0;
  for (int k = 1; k <= nt; ++k)
    for (int i = 0; i < nx; ++i) err = std::max(err, std::abs(y.at(k, i) - exact(g.coord(i), g.time(k))));
  return err;
}

Outcome mms_orders() {
  std::vector<double> hs, eh;
  for (int nx : {10, 20, 40, 80}) {
    hs.push_back(1.0 / (nx + 1));
    eh.push_back(mms_error(nx, 8, 1));
  }
  std::vector<double> dts, et;
  for (int nt : {10, 20, 40, 80}) {
    dts.push_back(1.0 / nt);
    et.push_back(mms_error(199, nt, 2));
  }
  const double ph = observed_order(hs, eh), pt = observed_order(dts, et);
  return {ph >= 1.9 && pt >= 0.9, fmt("order in h %.3f (need >= 1.9), order in dt %.3f (need >= 0.9)", ph, pt)};
}

// 5. Prox against brute-force minimization on a 1e-6 grid.
Outcome prox_oracle() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> W(-3.0, 3.0), S(0.0, 1.0), A(-1.0, 0.5), B(0.1, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double w = W(rng), smu = S(rng), alpha = A(rng), beta = alpha + B(rng);
    auto obj = [&](double p) { return 0.5 * (p - w) * (p - w) + smu * std::abs(p); };
    const long steps = static_cast<long>((beta - alpha) / 1e-6);
    double best = beta, best_val = obj(beta);
    for (long j = 0; j <= steps; ++j) {
      const double p = alpha + 1e-6 * static_cast<double>(j);
      const double val = obj(p);
      if (val < best_val) {
        best_val = val;
        best = p;
      }
    }
    worst = std::max(worst, std::abs(prox_scalar(w, smu, alpha, beta) - best));
  }
  return {worst <= 2e-6, fmt("max deviation %.3e over 1e4 tuples (tol 2e-6)", worst)};
}

// 6. Switching structure of a converged sparse solution.
Outcome foc_structure() {
  const StationaryInstance inst = sparse_instance(ZeroNonlinearity{});
  OptimizeOptions o;
  o.s0 = 50.0;
  o.stop_tol = 1e-11;
  o.max_iters = 20000;
  const OptimizeResult r = proximal_gradient(inst.spec, Field::space_time(inst.spec.grid), o);
  const Field phi = riesz_gradient_F(inst.spec, r.u);
  const double mu = inst.spec.mu;
  const Classification c =
      classify(r.u, phi, mu, default_band(phi, mu), 1e-10, inst.spec.alpha, inst.spec.beta);
  const Field lambda = multiplier_lambda(phi, mu);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    bool wrong = std::abs(lambda[i]) > 1.0;
    if (r.u[i] > 1e-10) wrong = wrong || std::abs(lambda[i] - 1.0) > 1e-8;
    if (r.u[i] < -1e-10) wrong = wrong || std::abs(lambda[i] + 1.0) > 1e-8;
    bad += wrong;
  }
  const bool pass = r.converged && c.violations == 0 && bad == 0;
  return {pass, fmt("converged=%d after %zu iterations, classification violations %zu, multiplier violations %zu",
                    int(r.converged), r.trace.size(), c.violations, bad)};
}

// 7. Inclusion of G^{tau'} in E^tau.
Outcome cone_inclusion() {
  const StationaryInstance inst = sparse_instance(cubic());
  const ConeAnalyzer cones(inst.spec, inst.u_bar, inst.phi_bar);
  std::size_t samples = 0, exceptions = 0;
  for (double tau : {0.01, 0.1}) {
    const InclusionCheck c = check_inclusion(cones, tau, 1000, 707);
    samples = std::max(samples, c.samples);
    exceptions += c.exceptions;
    if (c.samples < 1000) return {false, fmt("only %zu of 1000 members sampled at tau %g", c.samples, tau)};
  }
  return {exceptions == 0, fmt("1000 members per tau in {0.01, 0.1}, %zu exceptions", exceptions)};
}

// 8. Nesting and scaling invariants.
Outcome cone_nesting() {
  std::size_t exceptions = 0, members = 0;
  // The smooth instance has no node on the switching set; the mu = 0 one has
  // an adjoint vanishing on the whole middle time level.
  const StationaryInstance sparse = sparse_instance(cubic());
  const StationaryInstance flat = build_stationary_instance({.grid = SpaceTimeGrid(1, 40, 40, 1.0),
                                                             .op = OperatorA::laplacian(1),
                                                             .f = cubic(),
                                                             .mu = 0.0,
                                                             .alpha = -1.0,
                                                             .beta = 1.0,
                                                             .phi_bar = sine(0.3, 1, {1.0, -2.0})});
  for (const StationaryInstance* inst : {&sparse, &flat}) {
    const ConeAnalyzer a(inst->spec, inst->u_bar, inst->phi_bar);
    for (double tau : {0.01, 0.1}) {
      const NestingCheck n = check_nesting(a, tau, 1000, 808);
      exceptions += n.nesting_exceptions + n.ctau_exceptions + n.scaling_exceptions;
      members += n.c_members;
    }
  }
  return {exceptions == 0 && members > 0,
          fmt("4 x 1000 directions, %zu nonzero C members, %zu exceptions", members, exceptions)};
}

// 9. Coercivity ratio of the linear-quadratic problem.
Outcome convex_coercivity() {
  const ProblemSpec spec = convex_baseline_spec();
  const OptimizeResult r = solve_convex_baseline(spec);
  const ConeAnalyzer cones(spec, r.u);
  ConeQuery q;
  q.kind = ConeKind::Ctau;
  q.tau = 0.1;
  const CoercivityReport rep = ssc_report(cones, q, 200, 909);
  double dev = 0.0;
  for (const auto& s : rep.rows) dev = std::max(dev, std::abs(s.ratio - 1.0));
  return {rep.samples == 200 && dev <= 1e-8,
          fmt("%zu samples, min_ratio %.15f, max |ratio - 1| %.2e (tol 1e-8)", rep.samples, rep.min_ratio, dev)};
}

// 10. Quadratic growth on the convex baseline and a cubic sparse instance.
Outcome quadratic_growth() {
  const std::vector<double> rho{0.05, 0.2, 0.5, 1.0};
  std::string detail;
  bool pass = true;
  auto campaign = [&](const char* name, const ConeAnalyzer& cones, double eps) {
    double lo = 1e300, hi = 0.0;
    std::size_t counter = 0, kept = 500;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      const GrowthReport g = growth_report(cones, eps, 500, seed, rho);
      lo = std::min(lo, g.min_kappa);
      hi = std::max(hi, g.min_kappa);
      counter += g.counterexamples;
      kept = std::min(kept, g.samples);
    }
    const double spread = (hi - lo) / hi;
    pass = pass && lo > 0.0 && counter == 0 && kept == 500 && spread <= 0.25;
    detail += fmt("%s: min_kappa in [%.4g, %.4g] spread %.3f, counterexamples %zu; ", name, lo, hi, spread, counter);
  };
  const ProblemSpec convex = convex_baseline_spec();
  const ConeAnalyzer a(convex, solve_convex_baseline(convex).u);
  campaign("convex", a, 1.0);

  const StationaryInstance inst = sparse_instance(cubic());
  const ConeAnalyzer b(inst.spec, inst.u_bar, inst.phi_bar);
  ConeQuery q;
  q.kind = ConeKind::Ctau;
  q.tau = 0.1;
  const CoercivityReport ssc = ssc_report(b, q, 200, 1010);
  pass = pass && !ssc.vacuous && ssc.min_ratio >= 0.1;
  detail += fmt("cubic ssc min_ratio %.4f; ", ssc.min_ratio);
  campaign("cubic", b, 1.0);
  return {pass, detail};
}

// 11. Linearized-state estimates.
Outcome estimates() {
  const StationaryInstance inst = sparse_instance(cubic());
  const ConeAnalyzer cones(inst.spec, inst.u_bar, inst.phi_bar);
  const BoundsReport r = bounds_report(cones, 200, 1111, {1e-3, 1e-2, 1e-1, 0.5});
  bool stable = true;
  for (const SupEstimate* e : {&r.c_q2, &r.c_q1, &r.c_qinf, &r.lipschitz, &r.m2})
    stable = stable && e->finite && e->relative_growth() <= 0.1;
  const bool pass = stable && r.violations_linf == 0 && r.violations_l2 == 0 && r.below_premise > 0 &&
                    r.max_duality_error <= 1e-10 && r.psi_bound_violations == 0;
  return {pass, fmt("C_Q2 %.4g C_Q1 %.4g C_Qinf %.4g L %.4g M2 %.4g stable=%d; %zu near samples below premise, "
                    "violations %zu/%zu, duality %.1e",
                    r.c_q2.sup, r.c_q1.sup, r.c_qinf.sup, r.lipschitz.sup, r.m2.sup, int(stable), r.below_premise,
                    r.violations_linf, r.violations_l2, r.max_duality_error)};
}

// 12. Worker-count independence of report.csv.
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const std::string base = R"({
    "seed": 42,
    "grid": {"dim": 1, "nx": 30, "nt": 30, "T": 1.0},
    "nonlinearity": {"kind": "polynomial", "coefficients": [0, 0, 1]},
    "alpha": -1, "beta": 1, "mu": 0.1,
    "manufactured": {"phi_bar": {"kind": "sine", "amplitude": 0.3, "time_poly": [1, -2]}},
    "cones": {"tau": [0.1], "samples": 100},
    "growth": {"epsilon": 1.0, "samples": 100, "rho": [0.1, 0.5]},
    "bounds": {"samples": 50},)";
  const auto root = std::filesystem::temp_directory_path() / "sparse_ocp_determinism";
  std::size_t compared = 0, differ = 0;
  for (const char* mode : {"verify-soc", "growth", "bounds", "cones"}) {
    const RunConfig cfg = parse_config(base + "\"mode\": \"" + mode + "\"}");
    std::string reports[2];
    int i = 0;
    for (int workers : {1, 8}) {
      const auto dir = root / (std::string(mode) + "_" + std::to_string(workers));
      std::filesystem::remove_all(dir);
      run_pipeline(cfg, {.out_dir = dir.string(), .workers = workers});
      reports[i++] = slurp(dir / "report.csv");
    }
    ++compared;
    differ += reports[0] != reports[1] || reports[0].empty();
  }
  return {differ == 0, fmt("%zu pipelines compared at 1 vs 8 workers, %zu differ", compared, differ)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"discrete adjoint duality", adjoint_duality},
      {"gradient by central differences", gradient_fd},
      {"second-order Taylor remainder", taylor_second_order},
      {"manufactured-solution convergence", mms_orders},
      {"prox against grid-search oracle", prox_oracle},
      {"switching structure and multiplier", foc_structure},
      {"cone inclusion G^tau' in E^tau", cone_inclusion},
      {"cone nesting and scaling", cone_nesting},
      {"convex coercivity ratio", convex_coercivity},
      {"quadratic growth", quadratic_growth},
      {"linearized-state estimates", estimates},
      {"determinism across worker counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}

#include <doctest.h>

#include <cmath>

#include "sparse_ocp/error.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("scalar prox examples") {
  CHECK(prox_scalar(2.0, 0.5, -1.0, 1.0) == 1.0);
  CHECK(prox_scalar(0.3, 0.5, -1.0, 1.0) == 0.0);
  CHECK(prox_scalar(-0.8, 0.5, -1.0, 1.0) == doctest::Approx(-0.3));
  CHECK(prox_scalar(0.2, 0.0, 0.5, 1.0) == 0.5);
  CHECK(prox_scalar(-5.0, 1.0, 0.5, 1.0) == 0.5);
}

TEST_CASE("prox rejects bad arguments") {
  const SpaceTimeGrid g(1, 3, 2, 1.0);
  const Field w = Field::space_time(g);
  CHECK_THROWS_AS(prox_box_l1(w, 0.0, 0.1, -1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(prox_box_l1(w, 1.0, 0.1, 1.0, 1.0), InvalidInput);
}

TEST_CASE("prox is the minimizer among nearby admissible points") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> W(-3.0, 3.0), S(0.0, 1.0), A(-1.0, 0.5), B(0.1, 1.5), D(-1e-3, 1e-3);
  for (int i = 0; i < 2000; ++i) {
    const double w = W(rng), smu = S(rng), alpha = A(rng), beta = alpha + B(rng);
    const double p = prox_scalar(w, smu, alpha, beta);
    CHECK(p >= alpha);
    CHECK(p <= beta);
    auto obj = [&](double x) { return 0.5 * (x - w) * (x - w) + smu * std::abs(x); };
    for (int j = 0; j < 5; ++j) {
      const double q = std::clamp(p + D(rng), alpha, beta);
      CHECK(obj(p) <= obj(q) + 1e-15);
    }
  }
}

TEST_CASE("proximal gradient on a linear-quadratic problem") {
  const ProblemSpec spec = convex_baseline_spec(20, 20);
  OptimizeOptions o;
  o.s0 = 50.0;
  o.stop_tol = 1e-9;
  const OptimizeResult r = proximal_gradient(spec, Field::space_time(spec.grid), o);
  REQUIRE(r.converged);
  CHECK(r.residual <= o.stop_tol);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].J <= r.trace[i - 1].J);
  CHECK(r.cost.J == doctest::Approx(eval_cost(spec, r.u).J));
  CHECK(stationarity_residual(spec, r.u, 1.0) <= 1e-8);
  for (double v : r.u.values()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("proximal gradient recovers a manufactured sparse minimizer") {
  const StationaryInstance inst = sparse_instance(ZeroNonlinearity{}, 1, 30, 20);
  OptimizeOptions o;
  o.s0 = 50.0;
  o.stop_tol = 1e-11;
  const OptimizeResult r = proximal_gradient(inst.spec, Field::space_time(inst.spec.grid), o);
  REQUIRE(r.converged);
  CHECK(norm(r.u - inst.u_bar, NormKind::Linf) <= 1e-8);
}

TEST_CASE("stationarity residual vanishes only at stationary points") {
  const StationaryInstance inst = sparse_instance(cubic(), 0, 20, 10);
  CHECK(stationarity_residual(inst.spec, inst.u_bar, 1.0) <= 1e-11);
  CHECK(stationarity_residual(inst.spec, Field::space_time(inst.spec.grid), 1.0) > 1e-3);
}

TEST_CASE("multistart is sorted and independent of the worker count") {
  const SpaceTimeGrid g(1, 10, 10, 1.0);
  ProblemSpec spec = make_spec(g, cubic(), -1.0, 1.0, 0.05);
  spec.cost.y_d = evaluate_space_time(sine(0.3), g);
  OptimizeOptions o;
  o.s0 = 50.0;
  o.max_iters = 300;
  o.seed = 4;
  const auto a = multistart(spec, 4, o, 1);
  const auto b = multistart(spec, 4, o, 3);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0) CHECK(a[i - 1].cost.J <= a[i].cost.J);
    CHECK(a[i].seed == b[i].seed);
    CHECK(norm(a[i].u - b[i].u, NormKind::Linf) == 0.0);
  }
  CHECK_THROWS_AS(multistart(spec, 0, o), InvalidInput);
}

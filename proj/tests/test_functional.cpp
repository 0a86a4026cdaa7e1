#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace testing;

TEST_CASE("cost breakdown") {
  const SpaceTimeGrid g(1, 10, 10, 1.0);
  ProblemSpec spec = make_spec(g, ZeroNonlinearity{}, -2.0, 2.0, 0.3);
  spec.cost.y_d = Field::space_time(g, 1.0);
  const CostBreakdown c = eval_cost(spec, Field::space_time(g, -0.5));
  CHECK(c.j == doctest::Approx(0.5 * g.omega_measure()));
  CHECK(c.J == doctest::Approx(c.F + 0.3 * c.j));
  const Field y = solve_state(spec, Field::space_time(g, -0.5));
  CHECK(c.F == doctest::Approx(0.5 * std::pow(norm(y - spec.cost.y_d, NormKind::L2), 2)));
}

TEST_CASE("terminal tracking term") {
  const SpaceTimeGrid g(1, 8, 4, 1.0);
  ProblemSpec spec = make_spec(g, ZeroNonlinearity{}, -1.0, 1.0, 0.0, 1);
  spec.y0 = Field::terminal_slice(g, 0.0);
  spec.cost.y_omega = Field::terminal_slice(g, 2.0);
  // Zero control keeps the zero state: F = |Omega| * 4 / 2.
  CHECK(eval_cost(spec, Field::space_time(g)).F == doctest::Approx(2.0 * g.omega_measure()));
}

TEST_CASE("directional derivative of the L1 norm") {
  const SpaceTimeGrid g(1, 3, 1, 1.0);
  Field u = Field::space_time(g), v = Field::space_time(g);
  u[0] = 1.0;
  u[1] = 0.0;
  u[2] = -1.0;
  v[0] = -2.0;
  v[1] = -3.0;
  v[2] = -4.0;
  const double w = g.node_volume() * g.dt();
  CHECK(dirderiv_j(u, v) == doctest::Approx(w * (-2.0 + 3.0 + 4.0)));
}

TEST_CASE("j' matches one-sided differences") {
  const SpaceTimeGrid g(1, 10, 6, 1.0);
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto rng = sample_stream(12, i);
    Field u = random_field(g, rng);
    for (std::size_t k = 0; k < u.size(); k += 3) u[k] = 0.0;
    const Field v = random_field(g, rng);
    const double t = 1e-7;
    Field ut = u;
    ut.axpy(t, v);
    const double fd = (norm(ut, NormKind::L1) - norm(u, NormKind::L1)) / t;
    CHECK(dirderiv_j(u, v) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("gradient matches central differences") {
  for (int i = 0; i < 4; ++i) {
    auto rng = sample_stream(13, i);
    const SpaceTimeGrid g = i < 2 ? SpaceTimeGrid(1, 20, 12, 1.0) : SpaceTimeGrid(2, 6, 8, 0.5);
    const ProblemSpec spec = random_spec(g, i % 2 ? Nonlinearity{Exponential{0.4}} : Nonlinearity{cubic()}, i % 2, rng);
    const Field u = random_field(g, rng), v = random_field(g, rng);
    const double e = 1e-5;
    Field up = u, um = u;
    up.axpy(e, v);
    um.axpy(-e, v);
    const double fd = (eval_cost(spec, up).F - eval_cost(spec, um).F) / (2 * e);
    CHECK(inner_Q(riesz_gradient_F(spec, u), v) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("J' combines the adjoint pairing and mu j'") {
  const SpaceTimeGrid g(1, 12, 8, 1.0);
  auto rng = sample_stream(14, 0);
  ProblemSpec spec = random_spec(g, cubic(), 0, rng);
  spec.mu = 0.2;
  const Field u = random_field(g, rng), v = random_field(g, rng);
  const Field phi = riesz_gradient_F(spec, u);
  CHECK(dirderiv_J(spec, u, v) == doctest::Approx(inner_Q(phi, v) + 0.2 * dirderiv_j(u, v)));
  CHECK(dirderiv_J(phi, 0.2, u, v) == doctest::Approx(dirderiv_J(spec, u, v)));
}

TEST_CASE("second derivative is symmetric and matches differences of the gradient") {
  const SpaceTimeGrid g(1, 15, 10, 1.0);
  for (int nu : {0, 1}) {
    auto rng = sample_stream(15, nu);
    const ProblemSpec spec = random_spec(g, cubic(), nu, rng);
    const Field u = random_field(g, rng), v1 = random_field(g, rng), v2 = random_field(g, rng);
    const double h12 = hess_F_quadform(spec, u, v1, v2);
    CHECK(h12 == doctest::Approx(hess_F_quadform(spec, u, v2, v1)).epsilon(1e-12));
    const double e = 1e-5;
    Field up = u, um = u;
    up.axpy(e, v2);
    um.axpy(-e, v2);
    const double fd = (inner_Q(riesz_gradient_F(spec, up), v1) - inner_Q(riesz_gradient_F(spec, um), v1)) / (2 * e);
    CHECK(h12 == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("linear tracking: F'' v^2 equals the state metric") {
  const SpaceTimeGrid g(1, 15, 10, 1.0);
  auto rng = sample_stream(16, 0);
  for (int nu : {0, 1}) {
    const ProblemSpec spec = random_spec(g, ZeroNonlinearity{}, nu, rng);
    const PointEvaluation at(spec, random_field(g, rng));
    const Field v = random_field(g, rng);
    const Field z = at.linearized(v);
    CHECK(at.hess(z, z) == doctest::Approx(state_metric_sq(spec, z)).epsilon(1e-13));
  }
}

TEST_CASE("point evaluation agrees with the free functions") {
  const SpaceTimeGrid g(2, 5, 5, 1.0);
  auto rng = sample_stream(17, 0);
  ProblemSpec spec = random_spec(g, cubic(), 1, rng);
  spec.mu = 0.05;
  const Field u = random_field(g, rng), v = random_field(g, rng);
  const PointEvaluation at(spec, u);
  CHECK(at.cost().J == doctest::Approx(eval_cost(spec, u).J));
  CHECK(at.dirderiv_J(v) == doctest::Approx(dirderiv_J(spec, u, v)));
  CHECK(at.hess(at.linearized(v), at.linearized(v)) == doctest::Approx(hess_F_quadform(spec, u, v, v)));
}

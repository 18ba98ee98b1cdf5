#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"
#include "cahnlab/flow.hpp"
#include "cahnlab/photography.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cahnlab;
constexpr double pi = std::numbers::pi;

namespace {

ScalarField random_field(int n, unsigned seed, double lo, double hi) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField u(n);
  for (auto& x : u) x = dist(rng);
  return u;
}

}  // namespace

TEST_CASE("energy of constant fields") {
  const auto mesh = make_icosphere(4);
  const auto w = DoubleWell::quartic();
  const int n = mesh.num_vertices();
  CHECK(energy(mesh, w, 0.1, ScalarField::Zero(n)) == 0.0);
  const double half = energy(mesh, w, 0.1, ScalarField::Constant(n, 0.5));
  CHECK(half == doctest::Approx(mesh.total_area() / 16.0 / 0.1).epsilon(1e-13));
  CHECK(std::abs(half - 4 * pi / 16.0 / 0.1) <= 0.005 * 4 * pi / 16.0 / 0.1);
}

TEST_CASE("gradient of a constant field") {
  const auto mesh = make_icosphere(3);
  const auto w = DoubleWell::quartic();
  const double eps = 0.05, m = 0.3;
  const auto g = gradient(mesh, w, eps, ScalarField::Constant(mesh.num_vertices(), m));
  CHECK(g.projected.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(g.lambda == doctest::Approx(w.derivative(m) / eps).epsilon(1e-13));
  CHECK(ps_residual(mesh, w, eps, ScalarField::Constant(mesh.num_vertices(), m)) <= 1e-12);
}

TEST_CASE("finite-difference directional derivative") {
  const auto mesh = make_torus(2.0, 0.7, 16, 12);  // 192 vertices
  REQUIRE(mesh.num_vertices() == 192);
  const auto w = DoubleWell::quartic();
  const double eps = 0.2, h = 1e-5;
  for (unsigned seed : {1u, 2u, 3u}) {
    const ScalarField u = random_field(mesh.num_vertices(), seed, -0.2, 1.2);
    const ScalarField v = mean_zero(mesh, random_field(mesh.num_vertices(), 100 + seed, -1.0, 1.0));
    CHECK(std::abs(mesh.integrate(v)) <= 1e-12);
    const double fd = (energy(mesh, w, eps, u + h * v) - energy(mesh, w, eps, u - h * v)) / (2 * h);
    const double analytic = mesh.mass_dot(gradient(mesh, w, eps, u).projected, v);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::abs(analytic));
  }
}

TEST_CASE("gradient is linear in W") {
  const auto mesh = make_icosphere(2);
  const auto w = DoubleWell::quartic();
  const auto w2 = w.scaled(2.0);
  const double eps = 0.1;
  const ScalarField u = random_field(mesh.num_vertices(), 9, 0.0, 1.0);
  const auto g1 = gradient(mesh, w, eps, u);
  const auto g2 = gradient(mesh, w2, eps, u);
  ScalarField force(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) force[i] = w.derivative(u[i]) / eps;
  CHECK((g2.raw - g1.raw - force).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(energy(mesh, w2, eps, u) - energy(mesh, w, eps, u) ==
        doctest::Approx(energy(mesh, w, eps, u) - eps / 2 * u.dot(mesh.stiffness() * u)).epsilon(1e-12));
}

TEST_CASE("H^-1 residual") {
  const auto mesh = make_icosphere(3);
  const auto w = DoubleWell::quartic();
  const double eps = 0.1;
  CHECK(h_minus_one_norm(mesh, eps, ScalarField::Zero(mesh.num_vertices())) == 0.0);
  const ScalarField u = random_field(mesh.num_vertices(), 4, 0.0, 1.0);
  const auto g = gradient(mesh, w, eps, u);
  const double ps = ps_residual(mesh, w, eps, u);
  CHECK(ps > 0.0);
  CHECK(ps <= l2_norm(mesh, g.projected) * (1 + 1e-10));
}

TEST_CASE("constrained Hessian: symmetry and finite differences") {
  const auto mesh = make_icosphere(3);
  const auto w = DoubleWell::quartic();
  const double eps = 0.1;
  const ScalarField u = random_field(mesh.num_vertices(), 5, 0.0, 1.0);
  const ScalarField a = mean_zero(mesh, random_field(mesh.num_vertices(), 6, -1.0, 1.0));
  const ScalarField b = mean_zero(mesh, random_field(mesh.num_vertices(), 7, -1.0, 1.0));
  const ScalarField ha = constrained_hessian_apply(mesh, w, eps, u, a);
  const ScalarField hb = constrained_hessian_apply(mesh, w, eps, u, b);
  CHECK(mesh.mass_dot(ha, b) == doctest::Approx(mesh.mass_dot(a, hb)).epsilon(1e-12));
  CHECK(std::abs(mesh.integrate(ha)) <= 1e-10 * l2_norm(mesh, ha));
  const double h = 1e-6;
  const ScalarField fd =
      (gradient(mesh, w, eps, u + h * a).projected - gradient(mesh, w, eps, u - h * a).projected) / (2 * h);
  CHECK(l2_norm(mesh, fd - ha) <= 1e-6 * l2_norm(mesh, ha));
}

TEST_CASE("flow from a constant stops at step 1") {
  const auto mesh = make_icosphere(4);
  const auto w = DoubleWell::quartic();
  const double vol = 3.0;
  const auto cp = solve_constrained(mesh, w, 0.05, vol, ScalarField::Constant(mesh.num_vertices(), vol / mesh.total_area()));
  CHECK(cp.converged);
  CHECK(cp.steps == 1);
  CHECK(cp.grad_norm <= 1e-12);
  CHECK(cp.max_volume_drift <= 1e-8 * vol);
}

TEST_CASE("flow from a photograph") {
  const auto mesh = make_icosphere(4);
  const auto w = DoubleWell::quartic();
  const double eps = 0.05, vol = pi / 2;
  const auto u0 = photograph(mesh, w, eps, vol, 0).field;
  FlowConfig cfg;
  cfg.trajectory_every = 50;
  cfg.newton = false;
  const auto cp = solve_constrained(mesh, w, eps, vol, u0, cfg);
  CHECK(cp.converged);
  CHECK(cp.energy <= energy(mesh, w, eps, u0));
  CHECK(std::isfinite(cp.lambda));
  const double target = std::sqrt(2.0) / 6.0 * 2 * pi * std::sqrt(7.0) / 4.0;
  CHECK(std::abs(cp.energy - target) <= 0.15 * target);
  CHECK(cp.max_volume_drift <= 1e-8 * vol);
  CHECK(std::abs(mesh.integrate(cp.u) - vol) <= 1e-8 * vol);
  CHECK(cp.grad_norm <= default_tol_grad(mesh));
  CHECK(cp.ps_norm <= default_tol_grad(mesh) * std::sqrt(mesh.total_area()));

  REQUIRE(cp.trajectory.size() >= 3);
  int decreasing = 0;
  for (std::size_t k = 1; k < cp.trajectory.size(); ++k) {
    if (cp.trajectory[k].energy <= cp.trajectory[k - 1].energy) ++decreasing;
  }
  CHECK(decreasing >= 0.9 * (cp.trajectory.size() - 1));

  // the Newton phase reaches the same point
  const auto fast = solve_constrained(mesh, w, eps, vol, u0);
  CHECK(fast.converged);
  CHECK(fast.energy == doctest::Approx(cp.energy).epsilon(1e-8));
  CHECK(l2_norm(mesh, fast.u - cp.u) <= 1e-5);

  // bitwise reproducible
  const auto again = solve_constrained(mesh, w, eps, vol, u0);
  CHECK(again.u == fast.u);
  CHECK(again.steps == fast.steps);
}

TEST_CASE("semi-implicit step conserves the volume") {
  const auto mesh = make_torus(2.0, 0.7, 32, 16);
  const auto w = DoubleWell::quartic();
  ScalarField u = random_field(mesh.num_vertices(), 12, 0.0, 1.0);
  const double vol = mesh.integrate(u);
  for (int k = 0; k < 20; ++k) {
    u = semi_implicit_step(mesh, w, 0.1, u, 0.05);
    CHECK(std::abs(mesh.integrate(u) - vol) <= 1e-8 * vol);
  }
}

TEST_CASE("truncated flow stays between the junctions") {
  const auto mesh = make_icosphere(3);
  const auto w = DoubleWell::quartic();
  const double eps = 0.1;
  const auto t = truncate(w, eps, 10.0, 2.0);
  const double vol = 2.0;
  for (unsigned seed : {21u, 22u}) {
    ScalarField u0 = random_field(mesh.num_vertices(), seed, 0.0, 1.0);
    u0.array() += (vol - mesh.integrate(u0)) / mesh.total_area();
    const auto cp = solve_constrained(mesh, t, eps, vol, u0);
    CHECK(cp.converged);
    CHECK(cp.u.minCoeff() >= t.s_minus());
    CHECK(cp.u.maxCoeff() <= t.s_plus());
  }
}

TEST_CASE("flow errors") {
  const auto mesh = make_icosphere(2);
  const auto w = DoubleWell::quartic();
  const ScalarField u0 = ScalarField::Constant(mesh.num_vertices(), 0.2);
  CHECK_THROWS_AS(solve_constrained(mesh, w, 0.1, 1.0, u0), Rejection);
  CHECK_THROWS_AS(solve_constrained(mesh, w, 0.0, mesh.integrate(u0), u0), Rejection);
  CHECK_THROWS_AS(solve_constrained(mesh, w, 0.1, 1.0, ScalarField::Zero(3)), Rejection);
}

#include "cahnlab/error.hpp"
#include "cahnlab/profile.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace cahnlab;

// 10^6-node composite Simpson rule for the integral of 1/sqrt(1 + 2 s^2 (1-s)^2) on [0, 1].
constexpr double eta_at_one = 0.968857653272452;

TEST_CASE("eta at epsilon = 1 against the quadrature oracle") {
  const auto w = DoubleWell::quartic();
  CHECK(std::abs(profile_psi(w, 1.0, 0.0, 1.0) - eta_at_one) <= 1e-10);
  const auto table = build_profile(w, 1.0, 0.0, 1.0, 512);
  CHECK(std::abs(table.eta() - eta_at_one) <= 1e-10);
}

TEST_CASE("eta bound") {
  const auto w = DoubleWell::quartic();
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto table = build_profile(w, eps, 0.0, 1.0, 512);
    CHECK(table.eta() > 0.0);
    CHECK(table.eta() <= std::pow(eps, 0.25));
  }
  const auto shifted = build_profile(w, 0.01, 0.2, 0.9, 256);
  CHECK(shifted.eta() <= std::pow(0.01, 0.25) * 0.7);
}

TEST_CASE("zero potential gives the affine profile") {
  const auto w = DoubleWell::zero();
  for (double eps : {0.5, 0.1, 1e-3}) {
    const auto table = build_profile(w, eps, 0.0, 1.0, 256);
    CHECK(std::abs(table.eta() - std::pow(eps, 0.25)) <= 1e-12);
    CHECK(profile_residual(table, w).max_residual <= 1e-12);
    for (double f : {0.1, 0.37, 0.9}) {
      CHECK(table(f * table.eta()) == doctest::Approx(f).epsilon(1e-12));
    }
  }
}

TEST_CASE("second-order residual") {
  const auto w = DoubleWell::quartic();
  const auto r512 = profile_residual(build_profile(w, 0.1, 0.0, 1.0, 512), w);
  const auto r1024 = profile_residual(build_profile(w, 0.1, 0.0, 1.0, 1024), w);
  CHECK(r512.max_residual <= 1e-3);
  const double ratio = r512.max_residual / r1024.max_residual;
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
  const double c512 = r512.max_residual / (r512.spacing * r512.spacing);
  const double c1024 = r1024.max_residual / (r1024.spacing * r1024.spacing);
  CHECK(c1024 == doctest::Approx(c512).epsilon(0.25));
}

TEST_CASE("table shape, clamping and monotonicity") {
  const auto w = DoubleWell::quartic();
  const double eps = 0.05;
  const auto table = build_profile(w, eps, 0.0, 1.0, 300);
  CHECK(table(-1.0) == 0.0);
  CHECK(table(table.eta() + 1.0) == 1.0);
  CHECK(table.derivative(-0.5) == 0.0);
  CHECK(table.derivative(table.eta() + 0.5) == 0.0);
  // the clamped slope is zero, so the ODE residual there is sqrt(eps^{3/2}) = eps^{3/4}
  CHECK(std::abs(eps * table.derivative(-0.5) - std::sqrt(std::pow(eps, 1.5) + 2 * w.value(0.0))) ==
        doctest::Approx(std::pow(eps, 0.75)));
  double prev = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double v = table(table.eta() * k / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
  // samples obey the defining integral
  for (int i = 1; i < table.size(); i += 37) {
    CHECK(profile_psi(w, eps, 0.0, table.q()[i]) == doctest::Approx(table.t()[i]).epsilon(1e-9));
  }
  std::ostringstream csv;
  write_profile_csv(csv, table);
  CHECK(csv.str().rfind("t,q\n", 0) == 0);
}

TEST_CASE("profile errors") {
  const auto w = DoubleWell::quartic();
  CHECK_THROWS_AS(build_profile(w, 0.0, 0.0, 1.0, 512), Rejection);
  CHECK_THROWS_AS(build_profile(w, 0.1, 1.0, 0.0, 512), Rejection);
  CHECK_THROWS_AS(build_profile(w, 0.1, 0.0, 1.0, 8), Rejection);
  CHECK_THROWS_AS(ProfileTable(0.1, 0, 1, 1.5, {0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}), Rejection);
}

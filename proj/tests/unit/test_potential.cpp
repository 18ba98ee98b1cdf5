#include "cahnlab/error.hpp"
#include "cahnlab/potential.hpp"

#include <doctest.h>

#include <cmath>

using namespace cahnlab;

TEST_CASE("quartic values and derivatives") {
  const auto w = DoubleWell::quartic();
  CHECK(w.value(0.0) == 0.0);
  CHECK(w.value(1.0) == 0.0);
  CHECK(w.value(0.5) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(w.second_derivative(0.0) == doctest::Approx(2.0));
  CHECK(w.second_derivative(1.0) == doctest::Approx(2.0));
  CHECK(w.second_derivative(0.5) == doctest::Approx(-1.0));
  CHECK(w.derivative(2.0) == doctest::Approx(12.0));
  // near a well the expanded form cancels; the value must keep its relative accuracy
  for (double step : {1e-4, 1e-6, 1e-7}) {
    const double x = 1.0 + step;
    const double h = x - 1.0;  // exact in floating point
    const double exact = h * h * x * x;
    CHECK(std::abs(w.value(x) - exact) <= 1e-9 * exact);
  }
}

TEST_CASE("assumption grid") {
  const auto report = check_assumptions(DoubleWell::quartic());
  CHECK(report.all());
  CHECK(report.failures.empty());
  const auto zero = check_assumptions(DoubleWell::zero());
  CHECK_FALSE(zero.all());
  CHECK_FALSE(zero.failures.empty());
  // a single well has no maximum at 1/2
  DoubleWell single(Polynomial({0, 0, 1}), GrowthBound{2, 2, 2}, TailBound{0.5, 2, 2, 2, 1}, 0.5, "single");
  CHECK_FALSE(check_assumptions(single).wells);
  CHECK_FALSE(check_assumptions(single).exponents);
}

TEST_CASE("surface tension") {
  const auto w = DoubleWell::quartic();
  const double exact = std::sqrt(2.0) / 6.0;  // 0.2357022603955158
  CHECK(std::abs(sigma(w, 0.0, 1.0) - exact) <= 1e-10);
  CHECK(sigma(w, 0.3, 0.3) == 0.0);
  CHECK(sigma(DoubleWell::zero(), 0.0, 1.0) == 0.0);
  for (double m : {0.1, 0.5, 0.77}) {
    CHECK(sigma(w, 0.0, m) + sigma(w, m, 1.0) == doctest::Approx(sigma(w, 0.0, 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sigma(w, 1.0, 0.0), Rejection);
  // doubling W scales sigma by sqrt 2
  CHECK(sigma(w.scaled(2.0), 0.0, 1.0) == doctest::Approx(std::sqrt(2.0) * exact).epsilon(1e-12));
}

TEST_CASE("truncation") {
  const auto w = DoubleWell::quartic();
  const double eps = 0.1, lambda_star = 10.0, t1 = 2.0;
  const auto t = truncate(w, eps, lambda_star, t1);
  CHECK(t.s_plus() <= 2.0);
  CHECK(t.s_plus() >= t1);
  CHECK(w.derivative(t.s_plus()) / eps > lambda_star);
  CHECK(t.s_minus() <= -t1);
  CHECK(w.derivative(t.s_minus()) / eps < -lambda_star);

  for (int k = 0; k <= 400; ++k) {
    const double s = t.s_minus() + (t.s_plus() - t.s_minus()) * k / 400.0;
    CHECK(t.value(s) == w.value(s));
  }
  for (double h : {0.1, 1.0, 10.0}) {
    CHECK(t.second_derivative(t.s_plus() + h) == w.second_derivative(t.s_plus()));
    CHECK(t.second_derivative(t.s_minus() - h) == w.second_derivative(t.s_minus()));
  }
  // C2 at both junctions
  for (double j : {t.s_minus(), t.s_plus()}) {
    const double h = 1e-7;
    CHECK(t.value(j + h) == doctest::Approx(t.value(j - h)).epsilon(1e-6));
    CHECK(t.derivative(j + h) == doctest::Approx(t.derivative(j - h)).epsilon(1e-6));
    CHECK(t.second_derivative(j + h) == doctest::Approx(t.second_derivative(j - h)).epsilon(1e-5));
  }
  CHECK(barrier_holds(t, eps, lambda_star));
  CHECK_FALSE(barrier_holds(t, eps, 1e6));

  // the first grid point past t1 is taken even when t1 itself is far from the barrier
  const auto far = truncate(w, 0.01, 2000.0, 2.0);  // W' = 20 between 2.2 and 2.3
  CHECK(far.s_plus() > 2.2);
  CHECK(far.s_plus() < 2.3);
  CHECK(w.derivative(far.s_plus()) / 0.01 > 2000.0);
  CHECK(w.derivative(far.s_plus() - 1e-3) / 0.01 <= 2000.0);

  CHECK_THROWS_AS(truncate(w, 0.1, 10.0, 0.3), Rejection);  // W'' < 0 at s = 1/2, outside [-t1, t1]
  CHECK_THROWS_AS(truncate(w, 0.0, 10.0, 2.0), Rejection);
  CHECK_THROWS_AS(truncate(w, 0.1, -1.0, 2.0), Rejection);
  CHECK_THROWS_AS(TruncatedPotential(w, 1.0, -1.0), Rejection);
}

#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"
#include "cahnlab/photography.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace cahnlab;
constexpr double pi = std::numbers::pi;

namespace {

const SurfaceMesh& ico5() {
  static const SurfaceMesh mesh = make_icosphere(5);
  return mesh;
}

int north_pole(const SurfaceMesh& mesh) {
  int best = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.position(i).z() > mesh.position(best).z()) best = i;
  }
  return best;
}

}  // namespace

TEST_CASE("signed distance") {
  const auto& mesh = ico5();
  const int pole = north_pole(mesh);
  const auto d = geodesic_distance(mesh, pole);
  const auto sd = signed_distance(d, 0.7);
  CHECK(sd[pole] == doctest::Approx(0.7));
  const int v = 123;
  CHECK(signed_distance(d, d[v])[v] == 0.0);
  const auto full = signed_distance(mesh, pole, pi / 2);
  int south = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.position(i).z() < mesh.position(south).z()) south = i;
  }
  CHECK(std::abs(full[south] + pi / 2) <= 0.05 * pi / 2);
}

TEST_CASE("photograph with the zero potential is the clamped affine ramp") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::zero();
  const double eps = 0.01, vol = pi / 2;
  const auto f = photograph(mesh, w, eps, vol, 5, PhotographOptions{.profile_samples = 256});
  const double width = std::pow(eps, 0.25);
  const auto sd = signed_distance(f.distance, f.radius);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    CHECK(f.field[i] == doctest::Approx(std::clamp((sd[i] + f.delta) / width, 0.0, 1.0)).epsilon(1e-9));
  }
  CHECK(std::abs(mesh.integrate(f.field) - vol) <= 1e-8 * vol);
}

TEST_CASE("photograph energy near sigma times the cap perimeter") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  const double target = std::sqrt(2.0) / 6.0 * 2 * pi * std::sqrt(7.0) / 4.0;  // 0.97956
  const auto f = photograph(mesh, w, 0.02, pi / 2, north_pole(mesh));
  CHECK(std::abs(f.energy - target) <= 0.1 * target);
  CHECK(f.energy == energy(mesh, w, 0.02, f.field));
  CHECK(std::abs(mesh.integrate(f.field) - pi / 2) <= 1e-8 * pi / 2);
  CHECK(f.delta >= 0.0);
  CHECK(f.delta <= f.profile->eta());
}

TEST_CASE("shift stays in [0, eta]") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  for (double eps : {0.2, 0.05, 0.02}) {
    const auto profile = photography_profile(w, eps);
    for (int x0 : {0, 77, 4000, 10000}) {
      for (double vol : {0.05, 1.0, 4.0}) {
        const auto f = photograph(mesh, w, eps, vol, x0, profile);
        CHECK(f.delta >= 0.0);
        CHECK(f.delta <= profile->eta());
        CHECK(std::abs(mesh.integrate(f.field) - vol) <= 1e-8 * vol);
      }
    }
  }
}

TEST_CASE("sublevel check") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  const double eps = 0.01;
  const double vol = 2 * pi * (1 - std::cos(pi / 6));
  const double sig = sigma(w, 0.0, 1.0);
  const double margin = 0.1 * sig * isoperimetric_constant_2d() * std::sqrt(vol);
  const auto profile = photography_profile(w, eps);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, mesh.num_vertices() - 1);
  std::vector<ModicaField> fields;
  for (int k = 0; k < 50; ++k) fields.push_back(photograph(mesh, w, eps, vol, pick(rng), profile));
  const auto report = sublevel_check(w, vol, fields, margin);
  CHECK(report.all_inside);
  CHECK(report.entries.size() == 50);
  CHECK(report.level == doctest::Approx(sig * 2 * std::sqrt(pi) * std::sqrt(vol) + margin));

  CHECK(sublevel_check(w, vol, fields, std::numeric_limits<double>::infinity()).all_inside);

  ModicaField constant;
  constant.field = ScalarField::Constant(mesh.num_vertices(), vol / mesh.total_area());
  constant.energy = energy(mesh, w, eps, constant.field);
  const double m = vol / mesh.total_area();
  CHECK(constant.energy == doctest::Approx(w.value(m) * mesh.total_area() / eps).epsilon(1e-12));
  const auto flagged = sublevel_check(w, vol, {constant}, 0.0);
  CHECK_FALSE(flagged.all_inside);
  CHECK_FALSE(flagged.entries[0].inside);
}

TEST_CASE("photography modulus") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  const double eps = 0.05, vol = 0.5;
  const int x0 = north_pole(mesh);
  CHECK(photography_modulus(mesh, w, eps, vol, x0, x0) == 0.0);
  const int adjacent = mesh.neighbors(x0).front().vertex;
  const auto d = geodesic_distance(mesh, x0);
  int far = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (std::abs(d[i] - 1.0) < std::abs(d[far] - 1.0)) far = i;
  }
  const double near_value = photography_modulus(mesh, w, eps, vol, x0, adjacent);
  CHECK(near_value > 0.0);
  CHECK(near_value < photography_modulus(mesh, w, eps, vol, x0, far));
  CHECK(photography_modulus(mesh, w, eps, vol, adjacent, x0) == doctest::Approx(near_value).epsilon(1e-12));
}

TEST_CASE("L1 distance to the ball shrinks with epsilon") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    const double l1 = ball_l1_distance(mesh, photograph(mesh, w, eps, pi / 2, 0));
    CHECK(l1 > 0.0);
    CHECK(l1 <= prev);
    prev = l1;
  }
  CHECK_THROWS_AS(ball_l1_distance(mesh, photograph(mesh, w, 0.1, 1.0, 0), 0), Rejection);
}

TEST_CASE("photograph errors") {
  const auto& mesh = ico5();
  const auto w = DoubleWell::quartic();
  CHECK_THROWS_AS(photograph(mesh, w, 0.0, 1.0, 0), Rejection);
  CHECK_THROWS_AS(photograph(mesh, w, 0.1, 0.0, 0), Rejection);
  CHECK_THROWS_AS(photograph(mesh, w, 0.1, mesh.total_area(), 0), Rejection);
  CHECK_THROWS_AS(photograph(mesh, w, 0.1, 1.0, mesh.num_vertices()), Rejection);
  // one vertex star already carries more than V: the volume bracket fails
  CHECK_THROWS_AS(photograph(make_icosphere(1), w, 1e-3, 1e-4, 0), Rejection);
}

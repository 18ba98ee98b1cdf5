#include "cahnlab/distance.hpp"
#include "cahnlab/error.hpp"
#include "cahnlab/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

using namespace cahnlab;
constexpr double pi = std::numbers::pi;

namespace {

int farthest_from(const SurfaceMesh& mesh, int v) {
  int best = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if ((mesh.position(i) - mesh.position(v)).norm() > (mesh.position(best) - mesh.position(v)).norm()) best = i;
  }
  return best;
}

int north_pole(const SurfaceMesh& mesh) {
  int best = 0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.position(i).z() > mesh.position(best).z()) best = i;
  }
  return best;
}

}  // namespace

TEST_CASE("generators: counts and closure") {
  const auto ico = make_icosphere(3);
  CHECK(ico.num_vertices() == 642);
  CHECK(ico.num_triangles() == 1280);
  CHECK(std::abs(ico.total_area() - 4 * pi) <= 0.01 * 4 * pi);

  const auto torus = make_torus(2.0, 0.7, 8, 8);
  CHECK(torus.num_vertices() == 64);
  CHECK(torus.num_triangles() == 128);
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : torus.triangles()) {
    for (int c = 0; c < 3; ++c) {
      const int a = t[c], b = t[(c + 1) % 3];
      ++uses[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [edge, n] : uses) CHECK(n == 2);

  const auto ell = make_ellipsoid(1, 1, 1, 2);
  const auto sph = make_icosphere(2);
  REQUIRE(ell.num_vertices() == sph.num_vertices());
  for (int i = 0; i < sph.num_vertices(); ++i) CHECK(ell.position(i) == sph.position(i));

  for (int k = 1; k <= 4; ++k) CHECK(make_icosphere(k).num_vertices() == 10 * (1 << (2 * k)) + 2);
}

TEST_CASE("generators reject bad parameters") {
  CHECK_THROWS_AS(make_icosphere(0), Rejection);
  CHECK_THROWS_AS(make_torus(1.0, 2.0, 16, 16), Rejection);
  CHECK_THROWS_AS(make_torus(2.0, 0.7, 4, 16), Rejection);
  CHECK_THROWS_AS(make_ellipsoid(1, -1, 1, 2), Rejection);
  MeshSpec spec;
  spec.family = "klein";
  CHECK_THROWS_AS(generate_mesh(spec), Rejection);
}

TEST_CASE("operators: stiffness kernel, symmetry, Dirichlet energy of z") {
  const auto mesh = make_icosphere(4);
  const auto& s = mesh.stiffness();
  const ScalarField one = ScalarField::Ones(mesh.num_vertices());
  CHECK((s * one).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(one.dot(s * one) == doctest::Approx(0.0).epsilon(1e-12));
  const SparseMatrix st = s.transpose();
  CHECK((SparseMatrix(s - st)).norm() <= 1e-12 * s.norm());

  ScalarField z(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) z[i] = mesh.position(i).z();
  const double dirichlet = z.dot(s * z);
  CHECK(std::abs(dirichlet - 8 * pi / 3) <= 0.03 * 8 * pi / 3);
  CHECK(std::abs(mesh.total_area() - 4 * pi) <= 0.005 * 4 * pi);
  CHECK(mesh.lumped_mass().minCoeff() > 0.0);
  CHECK(mesh.lumped_mass().sum() == doctest::Approx(mesh.total_area()).epsilon(1e-12));
}

TEST_CASE("mesh validation") {
  const auto ico = make_icosphere(1);
  auto tris = ico.triangles();
  tris.pop_back();
  CHECK_THROWS_AS(SurfaceMesh(ico.positions(), tris), Rejection);  // boundary edge

  tris = ico.triangles();
  std::swap(tris[0][0], tris[0][1]);
  CHECK_THROWS_AS(SurfaceMesh(ico.positions(), tris), Rejection);  // inconsistent orientation

  auto pos = ico.positions();
  pos.push_back(Vec3(5, 5, 5));
  CHECK_THROWS_AS(SurfaceMesh(pos, ico.triangles()), Rejection);  // isolated vertex

  tris = ico.triangles();
  tris[0][1] = tris[0][0];
  CHECK_THROWS_AS(SurfaceMesh(ico.positions(), tris), Rejection);

  pos = ico.positions();
  pos[tris[3][0]] = pos[tris[3][1]];
  CHECK_THROWS_AS(SurfaceMesh(pos, ico.triangles()), Rejection);  // collapsed triangle
}

TEST_CASE("OFF and OBJ round trip") {
  const auto mesh = make_torus(2.0, 0.7, 12, 8);
  std::stringstream off;
  write_off(off, mesh);
  const auto back = read_off(off);
  CHECK(back.num_vertices() == mesh.num_vertices());
  CHECK(back.num_triangles() == mesh.num_triangles());
  CHECK(back.total_area() == doctest::Approx(mesh.total_area()).epsilon(1e-9));

  std::stringstream obj;
  obj.precision(17);
  for (const auto& p : mesh.positions()) obj << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  obj << "vn 0 0 1\n";
  for (const auto& t : mesh.triangles()) obj << "f " << t[0] + 1 << "/1 " << t[1] + 1 << "/1 " << t[2] + 1 << "/1\n";
  const auto from_obj = read_obj(obj);
  CHECK(from_obj.num_triangles() == mesh.num_triangles());
  CHECK(from_obj.total_area() == doctest::Approx(mesh.total_area()).epsilon(1e-12));

  std::stringstream bad("OFF\n4 4 0\n0 0 0\n1 0 0\n");
  CHECK_THROWS_AS(read_off(bad), Rejection);
  std::stringstream quads("OFF\n8 6 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n"
                          "4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n");
  const auto cube = read_off(quads);
  CHECK(cube.num_triangles() == 12);
  CHECK(cube.total_area() == doctest::Approx(6.0));
  CHECK_THROWS_AS(load_mesh("missing.off"), Rejection);
  CHECK_THROWS_AS(load_mesh("mesh.ply"), Rejection);
}

TEST_CASE("geodesic distance") {
  const auto mesh = make_icosphere(4);
  const int src = 17;
  for (auto method : {DistanceMethod::graph, DistanceMethod::fast_marching}) {
    const auto d = geodesic_distance(mesh, src, method);
    CHECK(d[src] == 0.0);
    const int anti = farthest_from(mesh, src);
    CHECK(std::abs(d[anti] - pi) <= 0.05 * pi);
    for (const auto& nb : mesh.neighbors(src)) {
      if (method == DistanceMethod::graph) {
        CHECK(d[nb.vertex] == nb.length);
      } else {
        CHECK(d[nb.vertex] <= nb.length * (1 + 1e-12));
      }
    }
  }
  // graph metric is symmetric
  const auto da = geodesic_distance(mesh, 3, DistanceMethod::graph);
  const auto db = geodesic_distance(mesh, 901, DistanceMethod::graph);
  CHECK(da[901] == doctest::Approx(db[3]).epsilon(1e-14));
  // fast marching never exceeds the graph metric
  const auto fm = geodesic_distance(mesh, 3, DistanceMethod::fast_marching);
  CHECK((fm - da).maxCoeff() <= 1e-12);
  // cutoff leaves far vertices at +inf, near ones unchanged
  const auto cut = geodesic_distance(mesh, 3, DistanceMethod::fast_marching, 0.5);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (fm[i] <= 0.5) CHECK(cut[i] == doctest::Approx(fm[i]));
  }
  CHECK_THROWS_AS(geodesic_distance(mesh, -1), Rejection);
}

TEST_CASE("ball radius for volume") {
  const auto mesh = make_icosphere(5);
  const int pole = north_pole(mesh);
  const auto d = geodesic_distance(mesh, pole);
  const auto br = ball_radius_for_volume(mesh, d, pi / 2);
  CHECK(std::abs(br.radius - std::acos(0.75)) <= 0.02 * std::acos(0.75));
  CHECK(std::abs(br.volume - pi / 2) <= 1e-8 * pi / 2);

  const auto half = ball_radius_for_volume(mesh, d, mesh.total_area() / 2);
  CHECK(std::abs(half.radius - pi / 2) <= mesh.max_edge_length());

  double prev = 1e9;
  for (double v : {1.0, 0.1, 0.01, 1e-3, 1e-4}) {
    const double r = ball_radius_for_volume(mesh, d, v).radius;
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 0.01);
  CHECK_THROWS_AS(ball_radius_for_volume(mesh, d, 0.0), Rejection);
  CHECK_THROWS_AS(ball_radius_for_volume(mesh, d, mesh.total_area()), Rejection);

  double vprev = 0.0;
  for (double r = 0.05; r < 3.0; r += 0.05) {
    const double v = ball_volume(mesh, d, r);
    CHECK(v >= vprev);
    vprev = v;
  }
}

TEST_CASE("ball perimeter") {
  const auto mesh = make_icosphere(5);
  const int pole = north_pole(mesh);
  const auto d = geodesic_distance(mesh, pole);
  CHECK(std::abs(ball_perimeter(mesh, d, pi / 2) - 2 * pi) <= 0.02 * 2 * pi);

  double shortest = 1e9;
  for (const auto& nb : mesh.neighbors(pole)) shortest = std::min(shortest, nb.length);
  CHECK(ball_perimeter(mesh, d, 0.5 * shortest) > 0.0);

  const double v = ball_volume(mesh, d, 0.1);
  const double ratio = ball_perimeter(mesh, d, 0.1) / (isoperimetric_constant_2d() * std::sqrt(v));
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  CHECK(isoperimetric_constant_2d() == doctest::Approx(3.5449077018).epsilon(1e-10));
}

#include "cahnlab/distance.hpp"

#include "cahnlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

namespace cahnlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using QueueItem = std::pair<double, int>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

// Planar unfolding of triangle (a, b, v): virtual source s at distances da, db
// from a and b on the far side of ab; valid only if segment s-v crosses ab.
double triangle_update(const Vec3& pa, const Vec3& pb, const Vec3& pv, double da, double db) {
  const Vec3 ab = pb - pa;
  const double c = ab.norm();
  const Vec3 ex = ab / c;
  const Vec3 av = pv - pa;
  const double vx = av.dot(ex);
  const double vy = (av - vx * ex).norm();
  if (vy <= 0.0) return kInf;
  const double sx = (da * da - db * db + c * c) / (2.0 * c);
  const double sy2 = da * da - sx * sx;
  if (sy2 < 0.0) return kInf;
  const double sy = -std::sqrt(sy2);
  const double x_cross = sx + (0.0 - sy) * (vx - sx) / (vy - sy);
  if (x_cross < 0.0 || x_cross > c) return kInf;
  return std::hypot(vx - sx, vy - sy);
}

ScalarField dijkstra(const SurfaceMesh& mesh, std::span<const int> sources, double cutoff) {
  ScalarField d = ScalarField::Constant(mesh.num_vertices(), kInf);
  MinQueue queue;
  for (int s : sources) {
    d[s] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    const auto [dv, v] = queue.top();
    queue.pop();
    if (dv > d[v]) continue;
    if (dv > cutoff) break;
    for (const auto& nb : mesh.neighbors(v)) {
      const double cand = dv + nb.length;
      if (cand < d[nb.vertex]) {
        d[nb.vertex] = cand;
        queue.emplace(cand, nb.vertex);
      }
    }
  }
  return d;
}

ScalarField fast_marching(const SurfaceMesh& mesh, std::span<const int> sources, double cutoff) {
  const int n = mesh.num_vertices();
  ScalarField d = ScalarField::Constant(n, kInf);
  std::vector<char> alive(n, 0);
  MinQueue queue;
  for (int s : sources) {
    d[s] = 0.0;
    queue.emplace(0.0, s);
  }
  const auto& pos = mesh.positions();
  const auto& tris = mesh.triangles();
  auto relax = [&](int v, double cand) {
    if (cand < d[v]) {
      d[v] = cand;
      queue.emplace(cand, v);
    }
  };
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (alive[u] || du > d[u]) continue;
    if (du > cutoff) break;
    alive[u] = 1;
    for (const auto& nb : mesh.neighbors(u)) {
      if (!alive[nb.vertex]) relax(nb.vertex, du + nb.length);
    }
    for (int t : mesh.vertex_triangles(u)) {
      const auto& tri = tris[t];
      int c = 0;
      while (tri[c] != u) ++c;
      const int v = tri[(c + 1) % 3];
      const int w = tri[(c + 2) % 3];
      if (alive[w] && !alive[v]) relax(v, triangle_update(pos[u], pos[w], pos[v], du, d[w]));
      if (alive[v] && !alive[w]) relax(w, triangle_update(pos[u], pos[v], pos[w], du, d[v]));
    }
  }
  return d;
}

}  // namespace

ScalarField geodesic_distance(const SurfaceMesh& mesh, std::span<const int> sources,
                              DistanceMethod method, double cutoff) {
  if (sources.empty()) throw Rejection("geodesic_distance: no sources");
  for (int s : sources) {
    if (s < 0 || s >= mesh.num_vertices()) throw Rejection("geodesic_distance: source out of range");
  }
  return method == DistanceMethod::graph ? dijkstra(mesh, sources, cutoff)
                                         : fast_marching(mesh, sources, cutoff);
}

ScalarField geodesic_distance(const SurfaceMesh& mesh, int source, DistanceMethod method, double cutoff) {
  const int sources[1] = {source};
  return geodesic_distance(mesh, std::span<const int>(sources), method, cutoff);
}

namespace {

struct Sorted {
  std::array<double, 3> f;
  std::array<int, 3> v;
};

Sorted sort_corners(const Triangle& tri, const ScalarField& f) {
  Sorted s{{f[tri[0]], f[tri[1]], f[tri[2]]}, {tri[0], tri[1], tri[2]}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2 - i; ++j) {
      if (s.f[j] > s.f[j + 1]) {
        std::swap(s.f[j], s.f[j + 1]);
        std::swap(s.v[j], s.v[j + 1]);
      }
    }
  }
  return s;
}

}  // namespace

double sublevel_area(const SurfaceMesh& mesh, const ScalarField& f, double level) {
  const auto& tris = mesh.triangles();
  const auto& areas = mesh.triangle_areas();
  double total = 0.0;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto s = sort_corners(tris[t], f);
    const double a = s.f[0], b = s.f[1], c = s.f[2];
    double frac;
    if (level <= a) {
      frac = 0.0;
    } else if (level >= c) {
      frac = 1.0;
    } else if (level <= b) {
      frac = (level - a) * (level - a) / ((b - a) * (c - a));
    } else {
      frac = 1.0 - (c - level) * (c - level) / ((c - a) * (c - b));
    }
    total += frac * areas[t];
  }
  return total;
}

double level_set_length(const SurfaceMesh& mesh, const ScalarField& f, double level) {
  const auto& pos = mesh.positions();
  double total = 0.0;
  for (const auto& tri : mesh.triangles()) {
    const auto s = sort_corners(tri, f);
    const double a = s.f[0], b = s.f[1], c = s.f[2];
    if (!(level > a && level < c)) continue;
    const Vec3& pa = pos[s.v[0]];
    const Vec3& pb = pos[s.v[1]];
    const Vec3& pc = pos[s.v[2]];
    const Vec3 p1 = pa + (level - a) / (c - a) * (pc - pa);
    const Vec3 p2 = level < b ? Vec3(pa + (level - a) / (b - a) * (pb - pa))
                              : Vec3(pb + (level - b) / (c - b) * (pc - pb));
    total += (p1 - p2).norm();
  }
  return total;
}

BallRadius ball_radius_for_volume(const SurfaceMesh& mesh, const ScalarField& distance, double volume) {
  if (!(volume > 0.0) || !(volume < mesh.total_area())) {
    throw Rejection("ball volume must lie in (0, total area)");
  }
  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index i = 0; i < distance.size(); ++i) {
    if (std::isfinite(distance[i])) hi = std::max(hi, distance[i]);
  }
  const double tol = 1e-8 * volume;
  double mid = 0.5 * (lo + hi);
  double vol = ball_volume(mesh, distance, mid);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    vol = ball_volume(mesh, distance, mid);
    if (std::abs(vol - volume) <= 1e-3 * tol) break;
    (vol < volume ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  if (std::abs(vol - volume) > tol) throw Rejection("ball_radius_for_volume: bisection did not reach tolerance");
  return {mid, vol};
}

BallRadius ball_radius_for_volume(const SurfaceMesh& mesh, int center, double volume, DistanceMethod method) {
  return ball_radius_for_volume(mesh, geodesic_distance(mesh, center, method), volume);
}

double ball_perimeter(const SurfaceMesh& mesh, const ScalarField& distance, double r) {
  return level_set_length(mesh, distance, r);
}

double ball_perimeter(const SurfaceMesh& mesh, int center, double r, DistanceMethod method) {
  return ball_perimeter(mesh, geodesic_distance(mesh, center, method), r);
}

double isoperimetric_constant_2d() { return 2.0 * std::sqrt(std::numbers::pi); }

}  // namespace cahnlab

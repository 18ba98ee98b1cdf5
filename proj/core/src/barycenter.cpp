#include "cahnlab/barycenter.hpp"

#include "cahnlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cahnlab {

Vec3 barycenter(const SurfaceMesh& mesh, const ScalarField& u) {
  if (u.size() != mesh.num_vertices()) throw Rejection("barycenter: field size mismatch");
  const auto& m = mesh.lumped_mass();
  const double total = mesh.integrate(u);
  if (std::abs(total) <= 1e-14 * mesh.total_area()) throw Rejection("barycenter: undefined for a field with zero integral");
  Vec3 acc = Vec3::Zero();
  for (int i = 0; i < mesh.num_vertices(); ++i) acc += (m[i] * u[i] / total) * mesh.position(i);
  return acc;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, Vec3* weights) {
  auto done = [&](double wa, double wb, double wc) {
    if (weights) *weights = Vec3(wa, wb, wc);
    return Vec3(wa * a + wb * b + wc * c);
  };
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return done(1, 0, 0);
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return done(0, 1, 0);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return done(1 - t, t, 0);
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return done(0, 0, 1);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return done(1 - t, 0, t);
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return done(0, 1 - t, t);
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return done(1 - v - w, v, w);
}

MeshProjector::MeshProjector(const SurfaceMesh& mesh) : mesh_(mesh), order_(mesh.num_triangles()) {
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * order_.size());
  build(0, static_cast<int>(order_.size()));
}

int MeshProjector::build(int begin, int end) {
  const auto& tris = mesh_.triangles();
  Node node;
  node.begin = begin;
  node.end = end;
  Eigen::AlignedBox3d centroids;
  for (int k = begin; k < end; ++k) {
    for (int v : tris[order_[k]]) node.box.extend(mesh_.position(v));
    const auto& t = tris[order_[k]];
    centroids.extend(Vec3((mesh_.position(t[0]) + mesh_.position(t[1]) + mesh_.position(t[2])) / 3.0));
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 8) return id;
  int axis = 0;
  centroids.sizes().maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int x, int y) {
    const auto& tx = tris[x];
    const auto& ty = tris[y];
    const double cx = mesh_.position(tx[0])[axis] + mesh_.position(tx[1])[axis] + mesh_.position(tx[2])[axis];
    const double cy = mesh_.position(ty[0])[axis] + mesh_.position(ty[1])[axis] + mesh_.position(ty[2])[axis];
    return cx < cy || (cx == cy && x < y);
  });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

ProjectionResult MeshProjector::project(const Vec3& point) const {
  constexpr double tie = 1e-9;
  const auto& tris = mesh_.triangles();
  struct Hit {
    int triangle;
    double distance;
    Vec3 point, weights;
  };
  std::vector<Hit> hits;  // everything within best + tie
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.exteriorDistance(point) > best + tie) continue;
    if (node.left < 0) {
      for (int k = node.begin; k < node.end; ++k) {
        const int t = order_[k];
        Vec3 w;
        const Vec3 q = closest_point_on_triangle(point, mesh_.position(tris[t][0]), mesh_.position(tris[t][1]),
                                                 mesh_.position(tris[t][2]), &w);
        const double d = (q - point).norm();
        if (d <= best + tie) {
          hits.push_back({t, d, q, w});
          best = std::min(best, d);
        }
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::erase_if(hits, [&](const Hit& h) { return h.distance > best + tie; });
  // Ties (within 1e-9) go to the lowest triangle index.
  const Hit* chosen = &*std::min_element(hits.begin(), hits.end(),
                                         [](const Hit& a, const Hit& b) { return a.triangle < b.triangle; });
  ProjectionResult out;
  out.query = point;
  out.point = chosen->point;
  out.triangle = chosen->triangle;
  out.barycentric = chosen->weights;
  out.distance = chosen->distance;
  int corner = 0;
  chosen->weights.maxCoeff(&corner);
  out.nearest_vertex = tris[chosen->triangle][corner];
  for (const auto& h : hits) {
    if ((h.point - chosen->point).norm() > tie) out.ambiguous = true;
  }
  return out;
}

ProjectionResult project_to_mesh(const SurfaceMesh& mesh, const Vec3& point) {
  return MeshProjector(mesh).project(point);
}

double interpolate(const SurfaceMesh& mesh, const ScalarField& f, int triangle, const Vec3& barycentric) {
  const auto& t = mesh.triangles().at(triangle);
  return barycentric[0] * f[t[0]] + barycentric[1] * f[t[1]] + barycentric[2] * f[t[2]];
}

HomotopyReport homotopy_audit(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume,
                              const std::vector<int>& base_points, const PhotographOptions& options) {
  HomotopyReport report;
  report.inj_estimate = mesh.inj_estimate();
  if (base_points.empty()) return report;
  const auto profile = photography_profile(w, epsilon, options);
  const MeshProjector projector(mesh);
  double sum = 0.0;
  for (int x0 : base_points) {
    const auto field = photograph(mesh, w, epsilon, volume, x0, profile, options);
    const auto proj = projector.project(barycenter(mesh, field.field));
    const double d = interpolate(mesh, field.distance, proj.triangle, proj.barycentric);
    report.entries.push_back({x0, d, proj.distance, proj.ambiguous});
    report.max_distance = std::max(report.max_distance, d);
    sum += d;
  }
  report.mean_distance = sum / static_cast<double>(base_points.size());
  if (report.inj_estimate) report.passed = report.max_distance < *report.inj_estimate;
  return report;
}

ThresholdSet threshold_set(const SurfaceMesh& mesh, const ScalarField& u, double level) {
  if (u.size() != mesh.num_vertices()) throw Rejection("threshold_set: field size mismatch");
  if (!(level > u.minCoeff() && level < u.maxCoeff())) {
    throw Rejection("threshold_set: level must lie strictly between min u and max u");
  }
  ThresholdSet out;
  out.indicator = (u.array() > level).cast<double>();
  out.complement = sublevel_area(mesh, u, level);
  out.volume = mesh.total_area() - out.complement;
  out.perimeter = level_set_length(mesh, u, level);
  return out;
}

Concentration concentration(const SurfaceMesh& mesh, const ScalarField& u, double r, DistanceMethod method) {
  if (!(r > 0.0)) throw Rejection("concentration: radius must be positive");
  const auto& m = mesh.lumped_mass();
  const ScalarField weight = m.cwiseProduct(u.cwiseAbs());
  const double total = weight.sum();
  if (!(total > 0.0)) throw Rejection("concentration: field has zero L1 mass");
  const double radius = 0.5 * r;
  Concentration best;
  for (int p = 0; p < mesh.num_vertices(); ++p) {
    const ScalarField d = geodesic_distance(mesh, p, method, radius);
    double inside = 0.0;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      if (d[i] < radius) inside += weight[i];
    }
    if (inside > best.fraction * total) {
      best.vertex = p;
      best.fraction = inside / total;
    }
  }
  if (best.vertex < 0) best = {0, 0.0};
  return best;
}

double region_diameter(const SurfaceMesh& mesh, const ScalarField& indicator, DistanceMethod method) {
  std::vector<int> support;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (indicator[i] > 0.5) support.push_back(i);
  }
  if (support.empty()) throw Rejection("region_diameter: empty support");
  double diameter = 0.0;
  for (int s : support) {
    const ScalarField d = geodesic_distance(mesh, s, method);
    for (int t : support) diameter = std::max(diameter, d[t]);
  }
  return diameter;
}

}  // namespace cahnlab

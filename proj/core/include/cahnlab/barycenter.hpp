#pragma once

#include "cahnlab/photography.hpp"

#include <Eigen/Geometry>

#include <memory>
#include <vector>

namespace cahnlab {

/// (sum m_i u_i x_i) / (sum m_i u_i). Throws Rejection when |int u| <= 1e-14 |M|.
Vec3 barycenter(const SurfaceMesh& mesh, const ScalarField& u);

struct ProjectionResult {
  Vec3 query;
  Vec3 point;          // nearest point on the surface
  int triangle = -1;
  Vec3 barycentric;    // of `point` in `triangle`
  double distance = 0.0;
  int nearest_vertex = -1;
  /// Another triangle lies within 1e-9 of the minimum distance with a
  /// different nearest point.
  bool ambiguous = false;
};

/// Exact closest point on a triangle (Ericson's region test); returns barycentric weights.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, Vec3* weights = nullptr);

/// Bounding-box hierarchy over the triangles of a mesh for nearest-point queries.
class MeshProjector {
 public:
  explicit MeshProjector(const SurfaceMesh& mesh);
  ProjectionResult project(const Vec3& point) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };
  int build(int begin, int end);
  const SurfaceMesh& mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

ProjectionResult project_to_mesh(const SurfaceMesh& mesh, const Vec3& point);

/// Geodesic distance field evaluated at a point inside a triangle.
double interpolate(const SurfaceMesh& mesh, const ScalarField& f, int triangle, const Vec3& barycentric);

struct HomotopyEntry {
  int base_point;
  double distance;  // d_g(pi(beta_1(Phi(x0))), x0)
  double tube_distance;
  bool ambiguous;
};

struct HomotopyReport {
  std::vector<HomotopyEntry> entries;
  double max_distance = 0.0;
  double mean_distance = 0.0;
  std::optional<double> inj_estimate;
  /// Empty when the mesh carries no injectivity estimate (check disabled).
  std::optional<bool> passed;
};

HomotopyReport homotopy_audit(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume,
                              const std::vector<int>& base_points, const PhotographOptions& options = {});

struct ThresholdSet {
  ScalarField indicator;  // 1 where u > level
  double volume = 0.0;     // interpolated area of {u > level}
  double complement = 0.0; // interpolated area of {u < level}
  double perimeter = 0.0;
};

/// Requires min u < level < max u.
ThresholdSet threshold_set(const SurfaceMesh& mesh, const ScalarField& u, double level);

struct Concentration {
  int vertex = -1;
  double fraction = 0.0;
};

/// argmax over vertices p of the lumped integral of |u| over B(p, r/2),
/// as a fraction of the integral of |u|.
Concentration concentration(const SurfaceMesh& mesh, const ScalarField& u, double r,
                            DistanceMethod method = DistanceMethod::fast_marching);

/// Largest geodesic distance between two vertices where indicator > 0.5.
double region_diameter(const SurfaceMesh& mesh, const ScalarField& indicator,
                       DistanceMethod method = DistanceMethod::fast_marching);

}  // namespace cahnlab

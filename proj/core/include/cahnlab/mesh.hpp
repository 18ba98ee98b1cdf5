#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cahnlab {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// One value per mesh vertex (phase field, distance, indicator, ...).
using ScalarField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MeshFamily { sphere, ellipsoid, torus, external };

std::string to_string(MeshFamily family);
MeshFamily mesh_family_from_string(const std::string& name);

struct Operators {
  ScalarField lumped_mass;
  SparseMatrix stiffness;
};

/// Cotangent stiffness and barycentric lumped mass of a triangle soup.
/// Throws Rejection for a triangle whose area is below 1e-14 of the mean.
Operators assemble_operators(const std::vector<Vec3>& positions,
                             const std::vector<Triangle>& triangles);

/// Closed, consistently oriented triangulated surface with its P1 operators.
///
/// The mesh is immutable after construction. Construction validates that
/// every undirected edge is used once in each direction, that the surface
/// is connected, and that all triangles have positive area.
class SurfaceMesh {
 public:
  struct Neighbor {
    int vertex;
    double length;
  };

  SurfaceMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles,
              MeshFamily family = MeshFamily::external,
              std::optional<double> inj_estimate = std::nullopt);

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(int v) const { return positions_[v]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const ScalarField& lumped_mass() const { return ops_.lumped_mass; }
  const SparseMatrix& stiffness() const { return ops_.stiffness; }
  const std::vector<double>& triangle_areas() const { return areas_; }
  double total_area() const { return total_area_; }

  MeshFamily family() const { return family_; }
  std::optional<double> inj_estimate() const { return inj_; }

  /// Edge-connected neighbors of v with Euclidean edge lengths.
  const std::vector<Neighbor>& neighbors(int v) const { return adjacency_[v]; }
  /// Triangles incident to v.
  const std::vector<int>& vertex_triangles(int v) const { return vertex_tris_[v]; }

  double mean_edge_length() const { return mean_edge_; }
  double max_edge_length() const { return max_edge_; }

  /// L2 inner product with the lumped mass.
  double mass_dot(const ScalarField& a, const ScalarField& b) const;
  /// Integral of a field against the lumped mass.
  double integrate(const ScalarField& u) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Triangle> triangles_;
  MeshFamily family_;
  std::optional<double> inj_;
  Operators ops_;
  std::vector<double> areas_;
  double total_area_ = 0.0;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::vector<int>> vertex_tris_;
  double mean_edge_ = 0.0;
  double max_edge_ = 0.0;
};

// Generators.
SurfaceMesh make_icosphere(int subdivisions);
SurfaceMesh make_ellipsoid(double a, double b, double c, int subdivisions);
SurfaceMesh make_torus(double major_radius, double minor_radius, int nu, int nv);

struct MeshSpec {
  std::string family;  // icosphere | ellipsoid | torus
  std::array<double, 3> axes{1.0, 1.0, 1.0};
  int subdivisions = 3;
  double major_radius = 2.0;
  double minor_radius = 0.7;
  int nu = 32;
  int nv = 16;
};

SurfaceMesh generate_mesh(const MeshSpec& spec);

// ASCII readers. OFF faces are 0-based, OBJ faces 1-based; polygons are fan-triangulated.
SurfaceMesh read_off(std::istream& in, MeshFamily family = MeshFamily::external,
                     std::optional<double> inj_estimate = std::nullopt);
SurfaceMesh read_obj(std::istream& in, MeshFamily family = MeshFamily::external,
                     std::optional<double> inj_estimate = std::nullopt);
/// Dispatches on the file extension (.off / .obj).
SurfaceMesh load_mesh(const std::string& path, MeshFamily family = MeshFamily::external,
                      std::optional<double> inj_estimate = std::nullopt);

void write_off(std::ostream& out, const SurfaceMesh& mesh);

}  // namespace cahnlab

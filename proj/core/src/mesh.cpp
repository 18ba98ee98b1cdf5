#include "cahnlab/mesh.hpp"

#include "cahnlab/error.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace cahnlab {

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::sphere: return "sphere";
    case MeshFamily::ellipsoid: return "ellipsoid";
    case MeshFamily::torus: return "torus";
    case MeshFamily::external: return "external";
  }
  return "external";
}

MeshFamily mesh_family_from_string(const std::string& name) {
  if (name == "sphere" || name == "icosphere") return MeshFamily::sphere;
  if (name == "ellipsoid") return MeshFamily::ellipsoid;
  if (name == "torus") return MeshFamily::torus;
  if (name == "external") return MeshFamily::external;
  throw Rejection("unknown mesh family '" + name + "'");
}

Operators assemble_operators(const std::vector<Vec3>& positions,
                             const std::vector<Triangle>& triangles) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  std::vector<double> areas(triangles.size());
  double area_sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& [i, j, k] = triangles[t];
    areas[t] = 0.5 * (positions[j] - positions[i]).cross(positions[k] - positions[i]).norm();
    area_sum += areas[t];
  }
  const double mean_area = triangles.empty() ? 0.0 : area_sum / static_cast<double>(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    if (!(areas[t] >= 1e-14 * mean_area) || areas[t] <= 0.0) {
      throw Rejection("degenerate triangle " + std::to_string(t) + " (area " +
                      std::to_string(areas[t]) + ")");
    }
  }

  Operators ops;
  ops.lumped_mass = ScalarField::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(triangles.size() * 9);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int c = 0; c < 3; ++c) {
      const int k = tri[c];
      const int i = tri[(c + 1) % 3];
      const int j = tri[(c + 2) % 3];
      const Vec3 ei = positions[i] - positions[k];
      const Vec3 ej = positions[j] - positions[k];
      // cot of the angle at k, opposite edge (i, j); |ei x ej| = 2 * area
      const double half_cot = 0.5 * ei.dot(ej) / (2.0 * areas[t]);
      triplets.emplace_back(i, j, -half_cot);
      triplets.emplace_back(j, i, -half_cot);
      triplets.emplace_back(i, i, half_cot);
      triplets.emplace_back(j, j, half_cot);
      ops.lumped_mass[k] += areas[t] / 3.0;
    }
  }
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  ops.stiffness.makeCompressed();
  return ops;
}

SurfaceMesh::SurfaceMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles,
                         MeshFamily family, std::optional<double> inj_estimate)
    : positions_(std::move(positions)),
      triangles_(std::move(triangles)),
      family_(family),
      inj_(inj_estimate) {
  const int n = num_vertices();
  if (n < 4 || triangles_.size() < 4) throw Rejection("mesh too small to be a closed surface");
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t]) {
      if (v < 0 || v >= n) throw Rejection("triangle " + std::to_string(t) + " has out-of-range index");
    }
    const auto& [a, b, c] = triangles_[t];
    if (a == b || b == c || a == c) throw Rejection("triangle " + std::to_string(t) + " repeats a vertex");
  }
  for (const auto& p : positions_) {
    if (!p.allFinite()) throw Rejection("non-finite vertex position");
  }

  // Each directed edge exactly once, and its twin exactly once.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(triangles_.size() * 3);
  auto key = [](int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); };
  for (const auto& tri : triangles_) {
    for (int c = 0; c < 3; ++c) {
      if (++directed[key(tri[c], tri[(c + 1) % 3])] > 1) {
        throw Rejection("edge (" + std::to_string(tri[c]) + "," + std::to_string(tri[(c + 1) % 3]) +
                        ") is non-manifold or inconsistently oriented");
      }
    }
  }
  for (const auto& [k, count] : directed) {
    const int a = static_cast<int>(k >> 32);
    const int b = static_cast<int>(k & 0xffffffffu);
    if (!directed.contains(key(b, a))) {
      throw Rejection("boundary edge (" + std::to_string(a) + "," + std::to_string(b) + "): surface is not closed");
    }
  }

  ops_ = assemble_operators(positions_, triangles_);

  areas_.resize(triangles_.size());
  vertex_tris_.assign(n, {});
  adjacency_.assign(n, {});
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& [i, j, k] = triangles_[t];
    areas_[t] = 0.5 * (positions_[j] - positions_[i]).cross(positions_[k] - positions_[i]).norm();
    total_area_ += areas_[t];
    for (int v : triangles_[t]) vertex_tris_[v].push_back(static_cast<int>(t));
  }
  double edge_sum = 0.0;
  int edge_count = 0;
  for (const auto& [k, count] : directed) {
    const int a = static_cast<int>(k >> 32);
    const int b = static_cast<int>(k & 0xffffffffu);
    const double len = (positions_[a] - positions_[b]).norm();
    adjacency_[a].push_back({b, len});
    if (a < b) {
      edge_sum += len;
      ++edge_count;
      max_edge_ = std::max(max_edge_, len);
    }
  }
  for (auto& nb : adjacency_) {
    std::sort(nb.begin(), nb.end(), [](const Neighbor& x, const Neighbor& y) { return x.vertex < y.vertex; });
  }
  mean_edge_ = edge_sum / edge_count;

  std::vector<char> seen(n, 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (const auto& nb : adjacency_[v]) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        ++reached;
        queue.push(nb.vertex);
      }
    }
  }
  if (reached != n) throw Rejection("mesh is not connected (or has isolated vertices)");
}

double SurfaceMesh::mass_dot(const ScalarField& a, const ScalarField& b) const {
  return (ops_.lumped_mass.array() * a.array() * b.array()).sum();
}

double SurfaceMesh::integrate(const ScalarField& u) const { return ops_.lumped_mass.dot(u); }

namespace {

struct RawMesh {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
};

RawMesh icosphere_raw(int subdivisions) {
  const double phi = std::numbers::phi;
  RawMesh m;
  m.positions = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                 {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                 {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : m.positions) p.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      m.positions.push_back((m.positions[a] + m.positions[b]).normalized());
      const int idx = static_cast<int>(m.positions.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> refined;
    refined.reserve(m.triangles.size() * 4);
    for (const auto& [a, b, c] : m.triangles) {
      const int ab = mid(a, b);
      const int bc = mid(b, c);
      const int ca = mid(c, a);
      refined.push_back({a, ab, ca});
      refined.push_back({b, bc, ab});
      refined.push_back({c, ca, bc});
      refined.push_back({ab, bc, ca});
    }
    m.triangles = std::move(refined);
  }
  return m;
}

}  // namespace

SurfaceMesh make_icosphere(int subdivisions) {
  if (subdivisions < 1) throw Rejection("icosphere needs subdivisions >= 1");
  auto raw = icosphere_raw(subdivisions);
  return SurfaceMesh(std::move(raw.positions), std::move(raw.triangles), MeshFamily::sphere,
                     std::numbers::pi);
}

SurfaceMesh make_ellipsoid(double a, double b, double c, int subdivisions) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw Rejection("ellipsoid axes must be positive");
  if (subdivisions < 1) throw Rejection("ellipsoid needs subdivisions >= 1");
  auto raw = icosphere_raw(subdivisions);
  for (auto& p : raw.positions) p = Vec3(a * p.x(), b * p.y(), c * p.z());
  // pi / sqrt(K_max); the largest Gaussian curvature is c_max^2 / (a_min^2 a_mid^2).
  std::array<double, 3> axes{a, b, c};
  std::sort(axes.begin(), axes.end());
  const double inj = std::numbers::pi * axes[0] * axes[1] / axes[2];
  return SurfaceMesh(std::move(raw.positions), std::move(raw.triangles), MeshFamily::ellipsoid, inj);
}

SurfaceMesh make_torus(double major_radius, double minor_radius, int nu, int nv) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
    throw Rejection("torus needs 0 < r < R");
  }
  if (nu < 8 || nv < 8) throw Rejection("torus needs nu, nv >= 8");
  std::vector<Vec3> positions;
  positions.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * std::numbers::pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * std::numbers::pi * j / nv;
      const double rho = major_radius + minor_radius * std::cos(v);
      positions.emplace_back(rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [nv, nu](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      triangles.push_back({a, b, c});
      triangles.push_back({a, c, d});
    }
  }
  return SurfaceMesh(std::move(positions), std::move(triangles), MeshFamily::torus,
                     std::numbers::pi * minor_radius);
}

SurfaceMesh generate_mesh(const MeshSpec& spec) {
  if (spec.family == "icosphere" || spec.family == "sphere") return make_icosphere(spec.subdivisions);
  if (spec.family == "ellipsoid") {
    return make_ellipsoid(spec.axes[0], spec.axes[1], spec.axes[2], spec.subdivisions);
  }
  if (spec.family == "torus") return make_torus(spec.major_radius, spec.minor_radius, spec.nu, spec.nv);
  throw Rejection("unknown mesh family '" + spec.family + "'");
}

namespace {

void fan(const std::vector<int>& poly, std::vector<Triangle>& out) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  throw Rejection("OFF: unexpected end of file");
}

}  // namespace

SurfaceMesh read_off(std::istream& in, MeshFamily family, std::optional<double> inj_estimate) {
  std::string header = next_data_line(in);
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic.rfind("OFF", 0) != 0) throw Rejection("OFF: missing header");
  long nv = -1, nf = -1, ne = 0;
  if (!(hs >> nv)) {
    std::istringstream cs(next_data_line(in));
    cs >> nv >> nf >> ne;
  } else {
    hs >> nf >> ne;
  }
  if (nv <= 0 || nf <= 0) throw Rejection("OFF: bad element counts");
  std::vector<Vec3> positions(nv);
  for (long i = 0; i < nv; ++i) {
    std::istringstream ls(next_data_line(in));
    if (!(ls >> positions[i].x() >> positions[i].y() >> positions[i].z())) {
      throw Rejection("OFF: bad vertex line " + std::to_string(i));
    }
  }
  std::vector<Triangle> triangles;
  for (long f = 0; f < nf; ++f) {
    std::istringstream ls(next_data_line(in));
    int count = 0;
    ls >> count;
    std::vector<int> poly(count);
    for (int& v : poly) {
      if (!(ls >> v)) throw Rejection("OFF: bad face line " + std::to_string(f));
    }
    if (count < 3) throw Rejection("OFF: face with fewer than 3 vertices");
    fan(poly, triangles);
  }
  return SurfaceMesh(std::move(positions), std::move(triangles), family, inj_estimate);
}

SurfaceMesh read_obj(std::istream& in, MeshFamily family, std::optional<double> inj_estimate) {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw Rejection("OBJ: bad vertex at line " + std::to_string(lineno));
      positions.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        const int idx = std::stoi(token.substr(0, token.find('/')));
        poly.push_back(idx > 0 ? idx - 1 : static_cast<int>(positions.size()) + idx);
      }
      if (poly.size() < 3) throw Rejection("OBJ: face with fewer than 3 vertices at line " + std::to_string(lineno));
      fan(poly, triangles);
    }
  }
  return SurfaceMesh(std::move(positions), std::move(triangles), family, inj_estimate);
}

SurfaceMesh load_mesh(const std::string& path, MeshFamily family, std::optional<double> inj_estimate) {
  std::ifstream in(path);
  if (!in) throw Rejection("cannot open mesh file '" + path + "'");
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == "off") return read_off(in, family, inj_estimate);
  if (ext == "obj") return read_obj(in, family, inj_estimate);
  throw Rejection("unsupported mesh format '." + ext + "'");
}

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  out.precision(17);
  for (const auto& p : mesh.positions()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& [a, b, c] : mesh.triangles()) out << "3 " << a << ' ' << b << ' ' << c << '\n';
}

}  // namespace cahnlab

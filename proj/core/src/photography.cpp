#include "cahnlab/photography.hpp"

#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"

#include <cmath>
#include <sstream>

namespace cahnlab {

ScalarField signed_distance(const ScalarField& distance_from_center, double radius) {
  return radius - distance_from_center.array();
}

ScalarField signed_distance(const SurfaceMesh& mesh, int center, double radius, DistanceMethod method) {
  return signed_distance(geodesic_distance(mesh, center, method), radius);
}

std::shared_ptr<const ProfileTable> photography_profile(const Potential& w, double epsilon,
                                                        const PhotographOptions& options) {
  return std::make_shared<const ProfileTable>(
      build_profile(w, epsilon, 0.0, 1.0, options.profile_samples, options.offset_exponent));
}

namespace {

double composed_volume(const SurfaceMesh& mesh, const ProfileTable& profile, const ScalarField& signed_dist,
                       double delta, ScalarField* field) {
  const auto& m = mesh.lumped_mass();
  double total = 0.0;
  for (Eigen::Index i = 0; i < signed_dist.size(); ++i) {
    const double v = profile(signed_dist[i] + delta);
    if (field) (*field)[i] = v;
    total += m[i] * v;
  }
  return total;
}

}  // namespace

ModicaField photograph(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int base_point,
                       std::shared_ptr<const ProfileTable> profile, const PhotographOptions& options) {
  if (!(epsilon > 0.0)) throw Rejection("photograph: epsilon must be positive");
  if (!(volume > 0.0 && volume < mesh.total_area())) throw Rejection("photograph: V must lie in (0, |M|)");
  if (base_point < 0 || base_point >= mesh.num_vertices()) throw Rejection("photograph: base point out of range");
  if (!profile) profile = photography_profile(w, epsilon, options);

  ModicaField out;
  out.base_point = base_point;
  out.epsilon = epsilon;
  out.volume = volume;
  out.profile = profile;
  out.distance = geodesic_distance(mesh, base_point, options.distance);
  out.radius = ball_radius_for_volume(mesh, out.distance, volume).radius;
  const ScalarField sd = signed_distance(out.distance, out.radius);

  const double eta = profile->eta();
  const double vtol = options.volume_tolerance * volume;
  const double g_lo = composed_volume(mesh, *profile, sd, 0.0, nullptr) - volume;
  const double g_hi = composed_volume(mesh, *profile, sd, eta, nullptr) - volume;
  out.field = ScalarField(mesh.num_vertices());
  bool rescale = false;
  if (g_lo > 0.0 || g_hi < 0.0) {
    const double miss = g_lo > 0.0 ? g_lo : -g_hi;
    if (miss > 10.0 * vtol) {
      std::ostringstream msg;
      msg << "photograph: volume bracket fails at base point " << base_point << " (G(0)=" << g_lo
          << ", G(eta)=" << g_hi << "); transition band under-resolved, use a smaller epsilon or a finer mesh";
      throw Rejection(msg.str());
    }
    out.delta = g_lo > 0.0 ? 0.0 : eta;
    rescale = true;
  } else {
    double lo = 0.0, hi = eta;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > options.delta_tolerance; ++it) {
      mid = 0.5 * (lo + hi);
      const double g = composed_volume(mesh, *profile, sd, mid, nullptr) - volume;
      if (g == 0.0) {
        lo = hi = mid;
        break;
      }
      (g < 0.0 ? lo : hi) = mid;
    }
    out.delta = 0.5 * (lo + hi);
  }
  const double achieved = composed_volume(mesh, *profile, sd, out.delta, &out.field);
  if (rescale || std::abs(achieved - volume) > vtol) {
    if (std::abs(achieved - volume) > 10.0 * vtol) {
      throw Rejection("photograph: volume mismatch after the shift solve");
    }
    out.field.array() += (volume - achieved) / mesh.total_area();
  }
  out.energy = energy(mesh, w, epsilon, out.field);
  return out;
}

ModicaField photograph(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int base_point,
                       const PhotographOptions& options) {
  return photograph(mesh, w, epsilon, volume, base_point, nullptr, options);
}

SublevelReport sublevel_check(const Potential& w, double volume, const std::vector<ModicaField>& fields,
                              double margin) {
  SublevelReport report;
  report.sigma = sigma(w, 0.0, 1.0);
  report.margin = margin;
  report.level = report.sigma * isoperimetric_constant_2d() * std::sqrt(volume) + margin;
  for (const auto& f : fields) {
    const bool inside = f.energy <= report.level;
    report.entries.push_back({f.base_point, f.energy, inside});
    report.max_energy = std::max(report.max_energy, f.energy);
    report.all_inside = report.all_inside && inside;
  }
  return report;
}

double h1_distance(const SurfaceMesh& mesh, double epsilon, const ScalarField& a, const ScalarField& b) {
  const ScalarField d = a - b;
  const double quad = epsilon * d.dot(mesh.stiffness() * d) + mesh.mass_dot(d, d);
  return std::sqrt(std::max(0.0, quad));
}

double photography_modulus(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int x0,
                           int x1, const PhotographOptions& options) {
  auto profile = photography_profile(w, epsilon, options);
  const auto a = photograph(mesh, w, epsilon, volume, x0, profile, options);
  const auto b = photograph(mesh, w, epsilon, volume, x1, profile, options);
  return h1_distance(mesh, epsilon, a.field, b.field);
}

double ball_l1_distance(const SurfaceMesh& mesh, const ModicaField& photo, int refine) {
  if (refine < 1) throw Rejection("ball_l1_distance: refine must be positive");
  const auto& areas = mesh.triangle_areas();
  const double inv = 1.0 / refine;
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    double sum = 0.0;
    auto sample = [&](double b1, double b2) {
      const double b0 = 1.0 - b1 - b2;
      const double d = b0 * photo.distance[tri[0]] + b1 * photo.distance[tri[1]] + b2 * photo.distance[tri[2]];
      const double u = b0 * photo.field[tri[0]] + b1 * photo.field[tri[1]] + b2 * photo.field[tri[2]];
      sum += std::abs(u - (d < photo.radius ? 1.0 : 0.0));
    };
    // centroids of the refine^2 sub-triangles
    for (int i = 0; i < refine; ++i) {
      for (int j = 0; i + j < refine; ++j) {
        sample((i + 1.0 / 3.0) * inv, (j + 1.0 / 3.0) * inv);
        if (i + j + 1 < refine) sample((i + 2.0 / 3.0) * inv, (j + 2.0 / 3.0) * inv);
      }
    }
    total += areas[t] * sum / (refine * refine);
  }
  return total;
}

}  // namespace cahnlab

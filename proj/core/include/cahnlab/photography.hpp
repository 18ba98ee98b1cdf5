#pragma once

#include "cahnlab/distance.hpp"
#include "cahnlab/profile.hpp"

#include <memory>
#include <vector>

namespace cahnlab {

/// Volume-matched Modica approximation of the indicator of the geodesic ball
/// of volume V around a base vertex (phases 0 and 1).
struct ModicaField {
  ScalarField field;
  ScalarField distance;  // geodesic distance from base_point
  int base_point = -1;
  double radius = 0.0;   // r_V
  double delta = 0.0;    // profile shift in [0, eta]
  double epsilon = 0.0;
  double volume = 0.0;
  double energy = 0.0;
  std::shared_ptr<const ProfileTable> profile;
};

struct PhotographOptions {
  int profile_samples = 2048;
  double offset_exponent = 1.5;
  DistanceMethod distance = DistanceMethod::fast_marching;
  double delta_tolerance = 1e-12;
  double volume_tolerance = 1e-8;  // relative to V
};

/// d_A for A = M \ B(x0, r): r - dist(x0, .), positive inside the ball.
ScalarField signed_distance(const ScalarField& distance_from_center, double radius);
ScalarField signed_distance(const SurfaceMesh& mesh, int center, double radius,
                            DistanceMethod method = DistanceMethod::fast_marching);

/// Photograph of x0 using a prebuilt profile (alpha = 0, beta = 1).
ModicaField photograph(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int base_point,
                       std::shared_ptr<const ProfileTable> profile, const PhotographOptions& options = {});
ModicaField photograph(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int base_point,
                       const PhotographOptions& options = {});

/// Profile used by photograph(): alpha = 0, beta = 1.
std::shared_ptr<const ProfileTable> photography_profile(const Potential& w, double epsilon,
                                                        const PhotographOptions& options = {});

struct SublevelEntry {
  int base_point;
  double energy;
  bool inside;
};

struct SublevelReport {
  double sigma = 0.0;
  double level = 0.0;   // sigma c_2 sqrt(V) + margin
  double margin = 0.0;
  double max_energy = 0.0;
  bool all_inside = true;
  std::vector<SublevelEntry> entries;
};

/// E <= sigma c_2 sqrt(V) + margin for each field (surfaces, N = 2).
SublevelReport sublevel_check(const Potential& w, double volume, const std::vector<ModicaField>& fields,
                              double margin);

/// sqrt(d^T (eps S + M) d), d = Phi(x0) - Phi(x1).
double photography_modulus(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume, int x0,
                           int x1, const PhotographOptions& options = {});
double h1_distance(const SurfaceMesh& mesh, double epsilon, const ScalarField& a, const ScalarField& b);

/// L1 distance between the field and the indicator of B(x0, r_V), both read
/// off the piecewise-linear interpolants on `refine`^2 sub-triangles per face.
double ball_l1_distance(const SurfaceMesh& mesh, const ModicaField& photo, int refine = 8);

}  // namespace cahnlab

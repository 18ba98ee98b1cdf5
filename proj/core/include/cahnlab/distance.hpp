#pragma once

#include "cahnlab/mesh.hpp"

#include <limits>
#include <span>

namespace cahnlab {

enum class DistanceMethod {
  graph,          ///< Dijkstra on the edge graph; symmetric, overestimates off-edge directions.
  fast_marching,  ///< First-order triangle updates, never larger than the graph metric.
};

/// Geodesic distance from `source` to every vertex. Vertices beyond `cutoff`
/// may be left at +inf.
ScalarField geodesic_distance(const SurfaceMesh& mesh, int source,
                              DistanceMethod method = DistanceMethod::fast_marching,
                              double cutoff = std::numeric_limits<double>::infinity());

/// Distance to the nearest of several sources.
ScalarField geodesic_distance(const SurfaceMesh& mesh, std::span<const int> sources,
                              DistanceMethod method = DistanceMethod::fast_marching,
                              double cutoff = std::numeric_limits<double>::infinity());

/// Area of {f < level} with f linear on each triangle.
double sublevel_area(const SurfaceMesh& mesh, const ScalarField& f, double level);

/// Length of the piecewise-linear level curve {f = level}.
double level_set_length(const SurfaceMesh& mesh, const ScalarField& f, double level);

/// Volume of the geodesic ball of radius r given the distance field from its center.
inline double ball_volume(const SurfaceMesh& mesh, const ScalarField& distance, double r) {
  return sublevel_area(mesh, distance, r);
}

struct BallRadius {
  double radius;
  double volume;  // interpolated volume at `radius`
};

/// Bisection for vol(B(center, r)) = V, tolerance 1e-8 V.
BallRadius ball_radius_for_volume(const SurfaceMesh& mesh, const ScalarField& distance, double volume);
BallRadius ball_radius_for_volume(const SurfaceMesh& mesh, int center, double volume,
                                  DistanceMethod method = DistanceMethod::fast_marching);

double ball_perimeter(const SurfaceMesh& mesh, const ScalarField& distance, double r);
double ball_perimeter(const SurfaceMesh& mesh, int center, double r,
                      DistanceMethod method = DistanceMethod::fast_marching);

/// Euclidean isoperimetric constant in dimension 2: 2 sqrt(pi).
double isoperimetric_constant_2d();

}  // namespace cahnlab

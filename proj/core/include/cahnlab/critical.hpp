#pragma once

#include "cahnlab/flow.hpp"

#include <vector>

namespace cahnlab {

struct MorseResult {
  int index = 0;
  std::vector<double> eigenvalues;  // ascending, the smallest k computed
  double tolerance = 0.0;
  bool nondegenerate = true;
  /// Every computed eigenvalue was negative: the index is only a lower bound.
  bool saturated = false;
  double max_residual = 0.0;
};

/// Smallest eigenvalues of the Hessian eps M^-1 S + (1/eps) diag W''(u) on
/// mean-zero fields, by shift-invert Lanczos below the spectrum.
/// `tol_eig <= 0` selects 1e-8 / eps. Throws Rejection if Lanczos does not converge.
MorseResult morse_index(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                        int k_max, double tol_eig = 0.0);

/// Negative count of the constrained Hessian from the inertia of a sparse
/// LDL^T factorization (Haynsworth on the bordered system). -1 if the
/// factorization hits a zero pivot.
int constrained_negative_count(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u);

struct MultiplierAudit {
  std::vector<double> epsilons;
  std::vector<double> ratios;  // |lambda| / E
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double variation = 1.0;  // max / min
  bool flagged = false;    // variation > 10
};

MultiplierAudit multiplier_audit(const std::vector<CriticalPoint>& runs);

}  // namespace cahnlab

#pragma once

#include "cahnlab/mesh.hpp"
#include "cahnlab/potential.hpp"

#include <optional>
#include <vector>

namespace cahnlab {

struct FlowConfig {
  double tau0 = 1e-2;
  double tau_max = 1.0;
  int max_steps = 20000;
  /// L2 norm of the projected gradient at acceptance; <= 0 selects 1e-8 sqrt(|M|).
  double tol_grad = 0.0;
  double backtrack = 0.5;
  double grow = 1.2;
  int grow_after = 5;
  double cg_tolerance = 1e-10;
  /// Damped Newton steps on the constrained system once the constrained
  /// Hessian is positive definite.
  bool newton = true;
  /// Newton is attempted only below this projected-gradient norm (relative to sqrt(|M|)).
  double newton_threshold = 1e-1;
  /// Semi-implicit steps between Newton attempts after a rejected attempt.
  int newton_retry = 25;
  /// Record (step, energy, grad, lambda) every k steps; 0 disables.
  int trajectory_every = 0;
  /// Also record the H^-1 residual at trajectory samples.
  bool trajectory_ps = false;
};

struct TrajectorySample {
  int step;
  double energy;
  double grad_norm;
  double lambda;
  double ps_norm;  // NaN unless recorded
};

struct CriticalPoint {
  ScalarField u;
  double lambda = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double ps_norm = 0.0;
  int steps = 0;
  int newton_steps = 0;
  bool converged = false;
  std::optional<int> morse_index;
  std::optional<bool> nondegenerate;
  double epsilon = 0.0;
  double volume = 0.0;
  double max_volume_drift = 0.0;  // max |int u - V| over accepted iterates
  std::optional<int> base_point;
  std::vector<TrajectorySample> trajectory;
};

double default_tol_grad(const SurfaceMesh& mesh);

/// Gradient flow of E_eps on {int u = V}:
///   (M/tau + eps S) u+ = M (u/tau - (1/eps) W'(u) + lambda(u)),
/// with energy backtracking on tau, followed by damped Newton steps on the
/// bordered system once the constrained Hessian is positive definite.
/// Requires |int u0 - V| <= 1e-8 V.
CriticalPoint solve_constrained(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume,
                                const ScalarField& u0, const FlowConfig& cfg = {});

/// One semi-implicit step with fixed tau (no backtracking); exposed for audits.
ScalarField semi_implicit_step(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                               double tau, double cg_tolerance = 1e-10);

}  // namespace cahnlab

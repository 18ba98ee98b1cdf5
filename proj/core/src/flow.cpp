#include "cahnlab/flow.hpp"

#include "cahnlab/energy.hpp"
#include "cahnlab/error.hpp"
#include "cahnlab/linalg.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>

namespace cahnlab {

double default_tol_grad(const SurfaceMesh& mesh) { return 1e-8 * std::sqrt(mesh.total_area()); }

namespace {

SparseMatrix implicit_matrix(const SurfaceMesh& mesh, double epsilon, double tau) {
  SparseMatrix a = epsilon * mesh.stiffness();
  const auto& m = mesh.lumped_mass();
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += m[i] / tau;
  return a;
}

ScalarField step_with(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                      double tau, const SparseMatrix& a, double cg_tolerance) {
  const auto& m = mesh.lumped_mass();
  ScalarField force(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) force[i] = w.derivative(u[i]) / epsilon;
  const double lambda = m.dot(force) / mesh.total_area();
  const ScalarField rhs = m.cwiseProduct(u / tau - force + ScalarField::Constant(u.size(), lambda));
  ScalarField next = solve_spd(a, rhs, cg_tolerance, &u);
  // Row sums of S vanish, so the volume is preserved up to the solver residual; remove that residual.
  next.array() += (mesh.integrate(u) - mesh.integrate(next)) / mesh.total_area();
  return next;
}

struct NewtonOutcome {
  bool positive_definite = false;
  ScalarField direction;
};

NewtonOutcome newton_direction(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                               const ScalarField& projected) {
  NewtonOutcome out;
  const auto& m = mesh.lumped_mass();
  SparseMatrix k = epsilon * mesh.stiffness();
  for (Eigen::Index i = 0; i < k.rows(); ++i) k.coeffRef(i, i) += m[i] * w.second_derivative(u[i]) / epsilon;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) return out;
  const auto d = ldlt.vectorD();
  int negative = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(std::abs(d[i]) > 0.0) || !std::isfinite(d[i])) return out;
    if (d[i] < 0.0) ++negative;
  }
  const ScalarField rhs = -m.cwiseProduct(projected);
  const ScalarField d1 = ldlt.solve(rhs);
  const ScalarField d2 = ldlt.solve(m);
  const double c2 = m.dot(d2);
  if (!std::isfinite(c2) || c2 == 0.0) return out;
  // Haynsworth inertia of the bordered matrix [[K, b], [b^T, 0]] with b = M 1.
  const int constrained_negative = negative + (c2 > 0.0 ? 1 : 0) - 1;
  if (constrained_negative != 0) return out;
  if ((k * d1 - rhs).norm() > 1e-8 * rhs.norm()) return out;
  out.direction = d1 - (m.dot(d1) / c2) * d2;
  out.positive_definite = out.direction.allFinite();
  return out;
}

}  // namespace

ScalarField semi_implicit_step(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                               double tau, double cg_tolerance) {
  return step_with(mesh, w, epsilon, u, tau, implicit_matrix(mesh, epsilon, tau), cg_tolerance);
}

CriticalPoint solve_constrained(const SurfaceMesh& mesh, const Potential& w, double epsilon, double volume,
                                const ScalarField& u0, const FlowConfig& cfg) {
  if (!(epsilon > 0.0)) throw Rejection("solve_constrained: epsilon must be positive");
  if (u0.size() != mesh.num_vertices()) throw Rejection("solve_constrained: field size mismatch");
  if (std::abs(mesh.integrate(u0) - volume) > 1e-8 * std::abs(volume)) {
    throw Rejection("solve_constrained: initial field violates the volume constraint");
  }
  const double tol = cfg.tol_grad > 0.0 ? cfg.tol_grad : default_tol_grad(mesh);
  const double newton_gate = cfg.newton_threshold * std::sqrt(mesh.total_area());

  CriticalPoint cp;
  cp.epsilon = epsilon;
  cp.volume = volume;
  ScalarField u = u0;
  double e = energy(mesh, w, epsilon, u);
  double tau = std::min(cfg.tau0, cfg.tau_max);
  SparseMatrix a = implicit_matrix(mesh, epsilon, tau);
  int accepted_in_row = 0;
  int next_newton = 1;
  bool stalled = false;

  Gradient g;
  double gnorm = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= cfg.max_steps; ++step) {
    cp.steps = step;
    g = gradient(mesh, w, epsilon, u);
    gnorm = l2_norm(mesh, g.projected);
    if (cfg.trajectory_every > 0 && (step - 1) % cfg.trajectory_every == 0) {
      const double ps = cfg.trajectory_ps ? h_minus_one_norm(mesh, epsilon, g.projected)
                                          : std::numeric_limits<double>::quiet_NaN();
      cp.trajectory.push_back({step, e, gnorm, g.lambda, ps});
    }
    if (gnorm <= tol) {
      cp.converged = true;
      break;
    }

    if (cfg.newton && gnorm <= newton_gate && step >= next_newton) {
      const auto newton = newton_direction(mesh, w, epsilon, u, g.projected);
      bool taken = false;
      if (newton.positive_definite) {
        double alpha = 1.0;
        for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
          ScalarField trial = u + alpha * newton.direction;
          trial.array() += (mesh.integrate(u) - mesh.integrate(trial)) / mesh.total_area();
          const double et = energy(mesh, w, epsilon, trial);
          if (et <= e + 1e-12 * std::abs(e)) {
            u = std::move(trial);
            e = et;
            taken = true;
            ++cp.newton_steps;
            break;
          }
        }
      }
      if (taken) {
        cp.max_volume_drift = std::max(cp.max_volume_drift, std::abs(mesh.integrate(u) - volume));
        continue;
      }
      next_newton = step + cfg.newton_retry;
    }

    bool accepted = false;
    while (!accepted) {
      ScalarField trial = step_with(mesh, w, epsilon, u, tau, a, cfg.cg_tolerance);
      const double et = energy(mesh, w, epsilon, trial);
      if (et <= e + 1e-12 * std::abs(e)) {
        u = std::move(trial);
        e = et;
        accepted = true;
        if (++accepted_in_row >= cfg.grow_after && tau < cfg.tau_max) {
          tau = std::min(cfg.tau_max, tau * cfg.grow);
          a = implicit_matrix(mesh, epsilon, tau);
          accepted_in_row = 0;
        }
      } else {
        tau *= cfg.backtrack;
        accepted_in_row = 0;
        if (tau < 1e-14) break;
        a = implicit_matrix(mesh, epsilon, tau);
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    cp.max_volume_drift = std::max(cp.max_volume_drift, std::abs(mesh.integrate(u) - volume));
  }

  if (!cp.converged && !stalled) {
    g = gradient(mesh, w, epsilon, u);
    gnorm = l2_norm(mesh, g.projected);
    cp.converged = gnorm <= tol;
  }
  cp.u = std::move(u);
  cp.energy = e;
  cp.lambda = g.lambda;
  cp.grad_norm = gnorm;
  cp.ps_norm = h_minus_one_norm(mesh, epsilon, g.projected);
  return cp;
}

}  // namespace cahnlab

#include "cahnlab/critical.hpp"

#include "cahnlab/error.hpp"
#include "cahnlab/linalg.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace cahnlab {

namespace {

SparseMatrix hessian_matrix(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                            double shift) {
  const auto& m = mesh.lumped_mass();
  SparseMatrix k = epsilon * mesh.stiffness();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    k.coeffRef(i, i) += m[i] * (w.second_derivative(u[i]) / epsilon - shift);
  }
  return k;
}

}  // namespace

MorseResult morse_index(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u,
                        int k_max, double tol_eig) {
  const int n = mesh.num_vertices();
  if (k_max <= 0 || k_max >= n - 1) throw Rejection("morse_index: k_max out of range");
  MorseResult result;
  result.tolerance = tol_eig > 0.0 ? tol_eig : 1e-8 / epsilon;

  // Shift strictly below the spectrum: eps S >= 0, so K - shift M is SPD.
  double min_curv = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.size(); ++i) min_curv = std::min(min_curv, w.second_derivative(u[i]) / epsilon);
  const double shift = min_curv - std::max(1.0, 0.1 * std::abs(min_curv));

  Eigen::SimplicialLLT<SparseMatrix> llt(hessian_matrix(mesh, w, epsilon, u, shift));
  if (llt.info() != Eigen::Success) throw Rejection("morse_index: shifted Hessian is not positive definite");

  // Symmetric form in y = M^{1/2} v; constants map to e = M^{1/2} 1 / |.|.
  const ScalarField sqrt_m = mesh.lumped_mass().cwiseSqrt();
  Eigen::MatrixXd e = sqrt_m / sqrt_m.norm();
  const ScalarField ze = llt.solve(sqrt_m.cwiseProduct(e.col(0)));
  const double ce = e.col(0).dot(sqrt_m.cwiseProduct(ze));
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    const ScalarField zb = llt.solve(sqrt_m.cwiseProduct(in));
    const double c = -e.col(0).dot(sqrt_m.cwiseProduct(zb)) / ce;
    out = sqrt_m.cwiseProduct(zb + c * ze);
  };

  LanczosOptions opts;
  opts.count = k_max;
  opts.tolerance = 1e-10;
  opts.max_outer = 40 + 2 * k_max;
  const auto lz = lanczos_largest(n, apply, e, opts);
  if (!lz.converged) {
    double worst = 0.0;
    for (double r : lz.residuals) worst = std::max(worst, r);
    throw Rejection("morse_index: Lanczos did not converge (locked " + std::to_string(lz.values.size()) + " of " +
                    std::to_string(k_max) + ", worst residual " + std::to_string(worst) + ")");
  }
  for (std::size_t i = 0; i < lz.values.size(); ++i) {
    const double theta = lz.values[i];
    result.eigenvalues.push_back(shift + 1.0 / theta);
    // residual of the shift-inverted pair mapped to the original eigenvalue
    result.max_residual = std::max(result.max_residual, lz.residuals[i] / (theta * theta));
  }
  std::sort(result.eigenvalues.begin(), result.eigenvalues.end());
  for (double mu : result.eigenvalues) {
    if (mu < -result.tolerance) ++result.index;
    if (std::abs(mu) <= result.tolerance) result.nondegenerate = false;
  }
  result.saturated = result.index == static_cast<int>(result.eigenvalues.size());
  return result;
}

int constrained_negative_count(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u) {
  const SparseMatrix k = hessian_matrix(mesh, w, epsilon, u, 0.0);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) return -1;
  int negative = 0;
  for (Eigen::Index i = 0; i < ldlt.vectorD().size(); ++i) {
    const double d = ldlt.vectorD()[i];
    if (d == 0.0 || !std::isfinite(d)) return -1;
    if (d < 0.0) ++negative;
  }
  const ScalarField& m = mesh.lumped_mass();
  const double c = m.dot(ldlt.solve(m));
  if (c == 0.0 || !std::isfinite(c)) return -1;
  return negative + (c > 0.0 ? 1 : 0) - 1;
}

MultiplierAudit multiplier_audit(const std::vector<CriticalPoint>& runs) {
  MultiplierAudit audit;
  if (runs.empty()) return audit;
  for (const auto& cp : runs) {
    audit.epsilons.push_back(cp.epsilon);
    audit.ratios.push_back(cp.energy > 0.0 ? std::abs(cp.lambda) / cp.energy
                                           : std::numeric_limits<double>::infinity());
  }
  audit.min_ratio = *std::min_element(audit.ratios.begin(), audit.ratios.end());
  audit.max_ratio = *std::max_element(audit.ratios.begin(), audit.ratios.end());
  audit.variation = audit.min_ratio > 0.0 ? audit.max_ratio / audit.min_ratio
                                          : std::numeric_limits<double>::infinity();
  audit.flagged = !(audit.variation <= 10.0);
  return audit;
}

}  // namespace cahnlab

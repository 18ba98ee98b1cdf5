#pragma once

#include "cahnlab/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace cahnlab {

/// Preconditioned (Jacobi) conjugate gradients for an SPD system.
/// Throws Rejection when the relative residual does not reach `tolerance`.
ScalarField solve_spd(const SparseMatrix& a, const ScalarField& b, double tolerance = 1e-10,
                      const ScalarField* guess = nullptr, int max_iterations = 0);

struct LanczosOptions {
  int count = 6;             // eigenvalues wanted (largest end)
  double tolerance = 1e-10;  // residual relative to the eigenvalue scale
  int max_outer = 60;        // restarts
  int min_steps = 40;        // Krylov dimension per restart (at least)
  unsigned seed = 12345;
};

struct LanczosResult {
  std::vector<double> values;     // descending
  std::vector<double> residuals;  // per value
  Eigen::MatrixXd vectors;        // columns match `values`
  bool converged = false;
  int applications = 0;
};

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

/// Largest eigenvalues of a symmetric operator on the orthogonal complement of
/// the (orthonormal) columns of `deflate`. Lanczos with full
/// reorthogonalization; converged Ritz pairs are locked and the iteration is
/// restarted so repeated eigenvalues are recovered one copy at a time.
LanczosResult lanczos_largest(int n, const LinearOperator& apply, const Eigen::MatrixXd& deflate,
                              const LanczosOptions& options);

}  // namespace cahnlab

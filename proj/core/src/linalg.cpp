#include "cahnlab/linalg.hpp"

#include "cahnlab/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cahnlab {

ScalarField solve_spd(const SparseMatrix& a, const ScalarField& b, double tolerance, const ScalarField* guess,
                      int max_iterations) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tolerance);
  cg.setMaxIterations(max_iterations > 0 ? max_iterations : static_cast<int>(4 * a.rows() + 100));
  cg.compute(a);
  if (b.norm() == 0.0) return ScalarField::Zero(b.size());
  ScalarField x;
  if (guess) x = cg.solveWithGuess(b, *guess);
  else x = cg.solve(b);
  if (cg.info() != Eigen::Success || !(cg.error() <= tolerance * 1.0001)) {
    throw Rejection("conjugate gradients stagnated (relative residual " + std::to_string(cg.error()) + ")");
  }
  return x;
}

namespace {

void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index columns) {
  if (columns == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const auto b = basis.leftCols(columns);
    v.noalias() -= b * (b.transpose() * v);
  }
}

}  // namespace

LanczosResult lanczos_largest(int n, const LinearOperator& apply, const Eigen::MatrixXd& deflate,
                              const LanczosOptions& options) {
  LanczosResult result;
  const int wanted = options.count;
  const auto nd = static_cast<int>(deflate.cols());
  const int space = n - nd;
  if (wanted <= 0 || wanted > space) throw Rejection("lanczos: requested count exceeds the space dimension");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&]() {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };

  const int guard = std::min(space, wanted + std::max(5, wanted / 5));
  const int capacity = std::min(space, guard + 10);
  Eigen::MatrixXd fixed(n, nd + capacity);  // deflation columns followed by locked vectors
  fixed.leftCols(nd) = deflate;
  int nlocked = 0;
  std::vector<double> locked_values;
  std::vector<double> locked_residuals;

  const int mmax = std::min(space, std::max(options.min_steps, 2 * guard + 20));
  Eigen::MatrixXd basis(n, mmax), image(n, mmax);
  int cur = 0;
  double scale = 0.0;

  // Orthogonalize against deflation, locked and current basis; append with its image.
  auto append = [&](Eigen::VectorXd x) {
    const double before = x.norm();
    if (!(before > 0.0)) return false;
    for (int pass = 0; pass < 2; ++pass) {
      orthogonalize(x, fixed, nd + nlocked);
      orthogonalize(x, basis, cur);
    }
    const double after = x.norm();
    if (!(after > 1e-10 * before)) return false;
    basis.col(cur) = x / after;
    Eigen::VectorXd ax(n);
    apply(basis.col(cur), ax);
    ++result.applications;
    image.col(cur) = ax;
    ++cur;
    return true;
  };

  auto kth_locked = [&]() {
    if (nlocked < wanted) return -std::numeric_limits<double>::infinity();
    std::vector<double> sorted = locked_values;
    std::nth_element(sorted.begin(), sorted.begin() + (wanted - 1), sorted.end(), std::greater<>());
    return sorted[wanted - 1];
  };

  append(random_vector());
  int quiet = 0;
  for (int outer = 0; outer < options.max_outer; ++outer) {
    const int room = std::min(mmax, space - nlocked);
    while (cur < room) {
      if (!append(image.col(cur - 1)) && !append(random_vector())) break;
    }
    if (cur == 0) break;

    Eigen::MatrixXd h = basis.leftCols(cur).transpose() * image.leftCols(cur);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(h);
    const Eigen::VectorXd& theta = rr.eigenvalues();  // ascending
    const Eigen::MatrixXd& s = rr.eigenvectors();
    scale = std::max({scale, std::abs(theta[0]), std::abs(theta[cur - 1])});

    const int examine = std::min(cur, guard - nlocked + 1);
    std::vector<int> lock, keep;
    std::vector<double> res(cur, 0.0);
    for (int r = 0; r < examine; ++r) {
      const int i = cur - 1 - r;
      res[i] = (image.leftCols(cur) * s.col(i) - theta[i] * (basis.leftCols(cur) * s.col(i))).norm();
      const bool conv = res[i] <= options.tolerance * scale;
      if (conv && nlocked + static_cast<int>(lock.size()) < capacity) {
        lock.push_back(i);
      } else {
        keep.push_back(i);
      }
    }
    const double kth_before = kth_locked();
    bool changed = false;
    for (int i : lock) {
      fixed.col(nd + nlocked) = basis.leftCols(cur) * s.col(i);
      ++nlocked;
      locked_values.push_back(theta[i]);
      locked_residuals.push_back(res[i]);
      changed = changed || theta[i] > kth_before;
    }

    // Done once enough pairs are locked and, for two restarts in a row
    // (each injecting a fresh random direction), nothing above the wanted
    // ones appeared.
    if (nlocked >= wanted) {
      const double kth = kth_locked();
      const double top_free = keep.empty() ? -std::numeric_limits<double>::infinity() : theta[keep.front()];
      quiet = (!changed && top_free <= kth) ? quiet + 1 : 0;
      if (quiet >= 2) {
        result.converged = true;
        break;
      }
    }
    if (nlocked >= capacity || nlocked >= space) {
      result.converged = nlocked >= wanted;
      break;
    }

    // Thick restart on the leading unconverged Ritz vectors, then a random
    // direction, then the Krylov continuation (the leading residual).
    const int nkeep = std::min(static_cast<int>(keep.size()), std::max(1, guard - nlocked));
    Eigen::MatrixXd sk(cur, nkeep);
    for (int j = 0; j < nkeep; ++j) sk.col(j) = s.col(keep[j]);
    Eigen::VectorXd continuation = Eigen::VectorXd::Zero(n);
    if (nkeep > 0) {
      continuation = image.leftCols(cur) * sk.col(0) - theta[keep[0]] * (basis.leftCols(cur) * sk.col(0));
    }
    const Eigen::MatrixXd nb = basis.leftCols(cur) * sk;
    const Eigen::MatrixXd ni = image.leftCols(cur) * sk;
    basis.leftCols(nkeep) = nb;
    image.leftCols(nkeep) = ni;
    cur = nkeep;
    append(random_vector());
    if (continuation.norm() > 0.0) append(continuation);
  }

  std::vector<int> order(nlocked);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return locked_values[a] > locked_values[b]; });
  const int count = std::min(wanted, nlocked);
  result.vectors.resize(n, count);
  for (int i = 0; i < count; ++i) {
    result.values.push_back(locked_values[order[i]]);
    result.residuals.push_back(locked_residuals[order[i]]);
    result.vectors.col(i) = fixed.col(nd + order[i]);
  }
  if (count < wanted) result.converged = false;
  return result;
}

}  // namespace cahnlab

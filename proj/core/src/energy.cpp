#include "cahnlab/energy.hpp"

#include "cahnlab/linalg.hpp"

#include <cmath>

namespace cahnlab {

double energy(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u) {
  const ScalarField su = mesh.stiffness() * u;
  double bulk = 0.0;
  const auto& m = mesh.lumped_mass();
  for (Eigen::Index i = 0; i < u.size(); ++i) bulk += m[i] * w.value(u[i]);
  return 0.5 * epsilon * u.dot(su) + bulk / epsilon;
}

Gradient gradient(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u) {
  const auto& m = mesh.lumped_mass();
  Gradient g;
  g.raw = epsilon * (mesh.stiffness() * u).cwiseQuotient(m);
  for (Eigen::Index i = 0; i < u.size(); ++i) g.raw[i] += w.derivative(u[i]) / epsilon;
  g.lambda = m.dot(g.raw) / mesh.total_area();
  g.projected = g.raw.array() - g.lambda;
  return g;
}

double l2_norm(const SurfaceMesh& mesh, const ScalarField& u) { return std::sqrt(mesh.mass_dot(u, u)); }

double h_minus_one_norm(const SurfaceMesh& mesh, double epsilon, const ScalarField& g) {
  const auto& m = mesh.lumped_mass();
  const ScalarField rhs = m.cwiseProduct(g);
  if (rhs.norm() == 0.0) return 0.0;
  SparseMatrix a = epsilon * mesh.stiffness();
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += m[i];
  const ScalarField sol = solve_spd(a, rhs, 1e-12);
  return std::sqrt(std::max(0.0, rhs.dot(sol)));
}

double ps_residual(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u) {
  return h_minus_one_norm(mesh, epsilon, gradient(mesh, w, epsilon, u).projected);
}

ScalarField mean_zero(const SurfaceMesh& mesh, const ScalarField& v) {
  return v.array() - mesh.integrate(v) / mesh.total_area();
}

ScalarField constrained_hessian_apply(const SurfaceMesh& mesh, const Potential& w, double epsilon,
                                      const ScalarField& u, const ScalarField& v) {
  const ScalarField pv = mean_zero(mesh, v);
  ScalarField out = epsilon * (mesh.stiffness() * pv).cwiseQuotient(mesh.lumped_mass());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] += w.second_derivative(u[i]) * pv[i] / epsilon;
  return mean_zero(mesh, out);
}

}  // namespace cahnlab

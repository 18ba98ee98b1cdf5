#pragma once

#include "cahnlab/mesh.hpp"
#include "cahnlab/potential.hpp"

namespace cahnlab {

/// E(u) = (eps/2) u^T S u + (1/eps) sum_i m_i W(u_i).
double energy(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u);

struct Gradient {
  ScalarField raw;        // eps M^-1 S u + (1/eps) W'(u)
  ScalarField projected;  // raw - lambda, mass-orthogonal to constants
  double lambda;          // mass-weighted mean of raw
};

Gradient gradient(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u);

/// L2 (lumped mass) norm.
double l2_norm(const SurfaceMesh& mesh, const ScalarField& u);

/// Discrete H^-1 norm of the projected gradient: solve (eps S + M) w = M g,
/// return sqrt(g^T M w).
double ps_residual(const SurfaceMesh& mesh, const Potential& w, double epsilon, const ScalarField& u);
double h_minus_one_norm(const SurfaceMesh& mesh, double epsilon, const ScalarField& g);

/// Constrained Hessian eps M^-1 S + (1/eps) diag W''(u), applied to the
/// mean-zero part of v and projected back onto mean-zero fields.
ScalarField constrained_hessian_apply(const SurfaceMesh& mesh, const Potential& w, double epsilon,
                                      const ScalarField& u, const ScalarField& v);

/// Removes the mass-weighted mean.
ScalarField mean_zero(const SurfaceMesh& mesh, const ScalarField& v);

}  // namespace cahnlab

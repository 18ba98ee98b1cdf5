#pragma once

#include "cahnlab/potential.hpp"

#include <iosfwd>
#include <vector>

namespace cahnlab {

/// Sampled inverse of
///   psi(s) = int_alpha^s eps / sqrt(eps^k + 2 W(r)) dr,   k = offset_exponent (default 3/2),
/// i.e. the finite-length transition profile q(t) rising from alpha at t = 0
/// to beta at t = eta. Outside [0, eta] the profile is clamped.
class ProfileTable {
 public:
  ProfileTable(double epsilon, double alpha, double beta, double offset_exponent,
               std::vector<double> t, std::vector<double> q, std::vector<double> slope);

  double epsilon() const { return epsilon_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double eta() const { return t_.back(); }
  double offset_exponent() const { return offset_exponent_; }
  int size() const { return static_cast<int>(t_.size()); }

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& q() const { return q_; }

  /// Monotone piecewise-cubic evaluation, clamped outside [0, eta].
  double operator()(double t) const;
  double derivative(double t) const;

  /// Largest spacing of the t samples.
  double max_spacing() const;

 private:
  int interval(double t) const;

  double epsilon_, alpha_, beta_, offset_exponent_;
  std::vector<double> t_, q_, slope_;
};

/// psi(s) evaluated by adaptive quadrature.
double profile_psi(const Potential& w, double epsilon, double alpha, double s, double offset_exponent = 1.5);

/// Builds the table on an s-grid graded toward alpha and beta.
ProfileTable build_profile(const Potential& w, double epsilon, double alpha, double beta, int n_samples,
                           double offset_exponent = 1.5);

struct ProfileResidual {
  double max_residual;
  double spacing;  // max t-spacing of the table
};

/// max over interior sample midpoints of |eps q' - sqrt(eps^k + 2 W(q))|,
/// with q' from the centered difference of neighbouring samples.
ProfileResidual profile_residual(const ProfileTable& table, const Potential& w);

/// Rows "t,q" with a one-line header.
void write_profile_csv(std::ostream& out, const ProfileTable& table);

}  // namespace cahnlab

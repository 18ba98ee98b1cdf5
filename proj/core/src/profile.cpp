#include "cahnlab/profile.hpp"

#include "cahnlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace cahnlab {

ProfileTable::ProfileTable(double epsilon, double alpha, double beta, double offset_exponent,
                           std::vector<double> t, std::vector<double> q, std::vector<double> slope)
    : epsilon_(epsilon),
      alpha_(alpha),
      beta_(beta),
      offset_exponent_(offset_exponent),
      t_(std::move(t)),
      q_(std::move(q)),
      slope_(std::move(slope)) {
  if (t_.size() < 2 || t_.size() != q_.size() || t_.size() != slope_.size()) {
    throw Rejection("profile table: inconsistent sample arrays");
  }
  for (std::size_t k = 1; k < t_.size(); ++k) {
    if (!(t_[k] > t_[k - 1]) || !(q_[k] > q_[k - 1])) {
      throw Rejection("profile table: samples must be strictly increasing");
    }
  }
}

int ProfileTable::interval(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto k = static_cast<int>(it - t_.begin()) - 1;
  return std::clamp(k, 0, size() - 2);
}

double ProfileTable::operator()(double t) const {
  if (t <= 0.0) return alpha_;
  if (t >= eta()) return beta_;
  const int k = interval(t);
  const double h = t_[k + 1] - t_[k];
  const double x = (t - t_[k]) / h;
  const double x2 = x * x, x3 = x2 * x;
  return (2 * x3 - 3 * x2 + 1) * q_[k] + (x3 - 2 * x2 + x) * h * slope_[k] +
         (-2 * x3 + 3 * x2) * q_[k + 1] + (x3 - x2) * h * slope_[k + 1];
}

double ProfileTable::derivative(double t) const {
  if (t < 0.0 || t > eta()) return 0.0;
  const int k = interval(t);
  const double h = t_[k + 1] - t_[k];
  const double x = (t - t_[k]) / h;
  const double x2 = x * x;
  return ((6 * x2 - 6 * x) * q_[k] + (3 * x2 - 4 * x + 1) * h * slope_[k] + (-6 * x2 + 6 * x) * q_[k + 1] +
          (3 * x2 - 2 * x) * h * slope_[k + 1]) /
         h;
}

double ProfileTable::max_spacing() const {
  double h = 0.0;
  for (std::size_t k = 1; k < t_.size(); ++k) h = std::max(h, t_[k] - t_[k - 1]);
  return h;
}

namespace {

double integrate_psi(const Potential& w, double epsilon, double offset, double a, double b) {
  // Integrate over [0, 1] so the reported error estimate carries the interval scale.
  const double len = b - a;
  auto f = [&](double x) {
    return len * epsilon / std::sqrt(offset + 2.0 * std::max(w.value(a + len * x), 0.0));
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-11, &err);
  if (!std::isfinite(value) || err > 1e-10 * std::abs(value) + 1e-300) {
    throw Rejection("profile: quadrature of psi did not converge on [" + std::to_string(a) + ", " +
                    std::to_string(b) + "] (estimate " + std::to_string(value) + ", error " + std::to_string(err) + ")");
  }
  return value;
}

}  // namespace

double profile_psi(const Potential& w, double epsilon, double alpha, double s, double offset_exponent) {
  if (s <= alpha) return 0.0;
  return integrate_psi(w, epsilon, std::pow(epsilon, offset_exponent), alpha, s);
}

ProfileTable build_profile(const Potential& w, double epsilon, double alpha, double beta, int n_samples,
                           double offset_exponent) {
  if (!(epsilon > 0.0)) throw Rejection("build_profile: epsilon must be positive");
  if (!(alpha < beta)) throw Rejection("build_profile: alpha must be below beta");
  if (n_samples < 64) throw Rejection("build_profile: need at least 64 samples");
  const double offset = std::pow(epsilon, offset_exponent);

  std::vector<double> s(n_samples), t(n_samples), slope(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double theta = std::numbers::pi * k / (n_samples - 1);
    s[k] = alpha + (beta - alpha) * 0.5 * (1.0 - std::cos(theta));
  }
  s.front() = alpha;
  s.back() = beta;
  t[0] = 0.0;
  for (int k = 1; k < n_samples; ++k) t[k] = t[k - 1] + integrate_psi(w, epsilon, offset, s[k - 1], s[k]);
  for (int k = 0; k < n_samples; ++k) {
    slope[k] = std::sqrt(offset + 2.0 * std::max(w.value(s[k]), 0.0)) / epsilon;
  }
  // Fritsch-Carlson limiter: keeps each cubic piece monotone.
  for (int k = 0; k + 1 < n_samples; ++k) {
    const double secant = (s[k + 1] - s[k]) / (t[k + 1] - t[k]);
    const double a = slope[k] / secant;
    const double b = slope[k + 1] / secant;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slope[k] = tau * a * secant;
      slope[k + 1] = tau * b * secant;
    }
  }
  return ProfileTable(epsilon, alpha, beta, offset_exponent, std::move(t), std::move(s), std::move(slope));
}

ProfileResidual profile_residual(const ProfileTable& table, const Potential& w) {
  const double eps = table.epsilon();
  const double offset = std::pow(eps, table.offset_exponent());
  const auto& t = table.t();
  const auto& q = table.q();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double mid = 0.5 * (t[k] + t[k + 1]);
    const double dq = (q[k + 1] - q[k]) / (t[k + 1] - t[k]);
    const double qm = table(mid);
    const double res = std::abs(eps * dq - std::sqrt(offset + 2.0 * std::max(w.value(qm), 0.0)));
    worst = std::max(worst, res);
  }
  return {worst, table.max_spacing()};
}

void write_profile_csv(std::ostream& out, const ProfileTable& table) {
  out << "t,q\n";
  out.precision(17);
  for (int k = 0; k < table.size(); ++k) out << table.t()[k] << ',' << table.q()[k] << '\n';
}

}  // namespace cahnlab

#include "cahnlab/potential.hpp"

#include "cahnlab/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace cahnlab {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

// Compensated Horner: the wells of an expanded polynomial cancel to roundoff otherwise.
double Polynomial::operator()(double x) const {
  double acc = 0.0, comp = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const double prod = acc * x;
    const double prod_err = std::fma(acc, x, -prod);
    const double sum = prod + *it;
    const double bv = sum - prod;
    const double sum_err = (prod - (sum - bv)) + (*it - bv);
    acc = sum;
    comp = std::fma(comp, x, prod_err + sum_err);
  }
  return acc + comp;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(double factor) const {
  auto c = coeffs_;
  for (double& x : c) x *= factor;
  return Polynomial(std::move(c));
}

DoubleWell::DoubleWell(Polynomial w, GrowthBound growth, TailBound tail, double barrier_delta, std::string id)
    : w_(std::move(w)),
      dw_(w_.derivative()),
      d2w_(dw_.derivative()),
      growth_(growth),
      tail_(tail),
      delta_(barrier_delta),
      id_(std::move(id)) {}

DoubleWell DoubleWell::quartic() {
  // s^2 (1-s)^2 = s^2 - 2 s^3 + s^4
  return DoubleWell(Polynomial({0.0, 0.0, 1.0, -2.0, 1.0}), GrowthBound{12.0, 12.0, 4.0},
                    TailBound{1.0, 2.0, 3.5, 4.0, 4.0}, 0.5, "quartic");
}

DoubleWell DoubleWell::zero() {
  return DoubleWell(Polynomial{}, GrowthBound{}, TailBound{}, 0.0, "zero");
}

DoubleWell DoubleWell::scaled(double factor) const {
  GrowthBound g = growth_;
  g.A *= factor;
  g.B *= factor;
  TailBound t = tail_;
  t.c1 *= factor;
  t.c2 *= factor;
  std::ostringstream id;
  id << factor << '*' << id_;
  return DoubleWell(w_.scaled(factor), g, t, delta_, id.str());
}

AssumptionReport check_assumptions(const DoubleWell& w, const AssumptionGrid& grid) {
  AssumptionReport r;
  auto fail = [&r](const std::string& msg) { r.failures.push_back(msg); };

  constexpr double tol = 1e-12;
  r.wells = std::abs(w.value(0.0)) <= tol && std::abs(w.value(1.0)) <= tol &&
            std::abs(w.derivative(0.0)) <= tol && std::abs(w.derivative(1.0)) <= tol &&
            w.second_derivative(0.0) > 0.0 && w.second_derivative(1.0) > 0.0 &&
            std::abs(w.derivative(0.5)) <= tol && w.second_derivative(0.5) < 0.0;
  if (!r.wells) fail("(a) wells at 0 and 1 / maximum at 1/2");

  const auto& g = w.growth();
  const auto& t = w.tail();
  r.growth = g.A > 0.0 && g.B > 0.0;
  r.tail = t.c1 > 0.0 && t.c2 > 0.0 && t.t0 > 0.0;
  r.exponents = t.p1 > 2.0 && t.p1 <= t.p2 && t.p2 <= 2.0 * (t.p1 - 1.0);
  if (!r.exponents) fail("(d) exponent constraints 2 < p1 <= p2 <= 2(p1-1)");

  int sign_changes = 0;
  double prev_dw = w.derivative(-grid.range);
  for (int k = 0; k < grid.samples; ++k) {
    const double s = -grid.range + 2.0 * grid.range * k / (grid.samples - 1);
    const double ws = w.value(s);
    const double dws = w.derivative(s);
    if (r.wells && std::abs(s) > 1e-9 && std::abs(s - 1.0) > 1e-9 && !(ws > 0.0)) {
      r.wells = false;
      fail("(a) W vanishes away from the wells at s=" + std::to_string(s));
    }
    if ((dws > 0.0) != (prev_dw > 0.0) && dws != 0.0) ++sign_changes;
    if (dws != 0.0) prev_dw = dws;
    if (r.growth && std::abs(dws) > g.A + g.B * std::pow(std::abs(s), g.p - 1.0)) {
      r.growth = false;
      fail("(b) growth bound violated at s=" + std::to_string(s));
    }
    const double at = std::abs(s);
    if (r.tail && at >= t.t0 &&
        !(t.c1 * std::pow(at, t.p1) < ws && ws < t.c2 * std::pow(at, t.p2))) {
      r.tail = false;
      fail("(d) tail bound violated at s=" + std::to_string(s));
    }
  }
  // W' changes sign exactly at 0, 1/2, 1 for a two-well shape.
  if (r.wells && sign_changes != 3) {
    r.wells = false;
    fail("(a) W' has " + std::to_string(sign_changes) + " sign changes, expected 3");
  }

  r.barrier = w.barrier_delta() > 0.0;
  const int nb = std::max(2, grid.samples / 100);
  for (int k = 1; k <= nb && r.barrier; ++k) {
    const double s = 1.0 + w.barrier_delta() * k / nb;
    if (!(w.derivative(s) > 0.0)) {
      r.barrier = false;
      fail("(c) W' not positive at s=" + std::to_string(s));
    }
  }
  if (w.barrier_delta() <= 0.0) fail("(c) barrier delta must be positive");
  return r;
}

double sigma(const Potential& w, double alpha, double beta) {
  if (alpha > beta) throw Rejection("sigma: alpha must not exceed beta");
  if (alpha == beta) return 0.0;
  const double len = beta - alpha;
  auto f = [&](double x) {
    const double v = w.value(alpha + len * x);
    if (v < -1e-14) throw Rejection("sigma: W negative on the interval");
    return len * std::sqrt(2.0 * std::max(v, 0.0));
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-12, &err);
  if (!std::isfinite(value) || err > 1e-10 * std::abs(value) + 1e-300) {
    if (!(value == 0.0 && err == 0.0)) throw Rejection("sigma: quadrature did not converge");
  }
  return value;
}

TruncatedPotential::TruncatedPotential(const DoubleWell& base, double s_minus, double s_plus)
    : base_(base), s_minus_(s_minus), s_plus_(s_plus) {
  if (!(s_minus < s_plus)) throw Rejection("truncation junctions must satisfy s- < s+");
  wm_[0] = base.value(s_minus);
  wm_[1] = base.derivative(s_minus);
  wm_[2] = base.second_derivative(s_minus);
  wp_[0] = base.value(s_plus);
  wp_[1] = base.derivative(s_plus);
  wp_[2] = base.second_derivative(s_plus);
}

double TruncatedPotential::value(double s) const {
  if (s > s_plus_) {
    const double h = s - s_plus_;
    return wp_[0] + wp_[1] * h + 0.5 * wp_[2] * h * h;
  }
  if (s < s_minus_) {
    const double h = s - s_minus_;
    return wm_[0] + wm_[1] * h + 0.5 * wm_[2] * h * h;
  }
  return base_.value(s);
}

double TruncatedPotential::derivative(double s) const {
  if (s > s_plus_) return wp_[1] + wp_[2] * (s - s_plus_);
  if (s < s_minus_) return wm_[1] + wm_[2] * (s - s_minus_);
  return base_.derivative(s);
}

double TruncatedPotential::second_derivative(double s) const {
  if (s > s_plus_) return wp_[2];
  if (s < s_minus_) return wm_[2];
  return base_.second_derivative(s);
}

std::string TruncatedPotential::id() const {
  std::ostringstream os;
  os << "truncated(" << base_.id() << "," << s_minus_ << "," << s_plus_ << ")";
  return os.str();
}

namespace {

// First k >= 0 with pred(start + dir * k * step), assuming pred is monotone in k.
double first_grid_point(double start, double dir, double step, double bound, auto pred) {
  if (pred(start)) return start;
  long long hi = 1;
  while (!pred(start + dir * hi * step)) {
    if (std::abs(start + dir * hi * step) > bound) {
      throw Rejection("truncate: barrier search exceeded |s| > bound; W' grows too slowly");
    }
    hi *= 2;
  }
  long long lo = hi / 2;
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (pred(start + dir * mid * step) ? hi : lo) = mid;
  }
  return start + dir * hi * step;
}

}  // namespace

TruncatedPotential truncate(const DoubleWell& w, double epsilon, double lambda_star, double t1,
                            const TruncationOptions& options) {
  if (!(epsilon > 0.0)) throw Rejection("truncate: epsilon must be positive");
  if (!(lambda_star > 0.0)) throw Rejection("truncate: lambda_star must be positive");
  if (!(t1 > 0.0)) throw Rejection("truncate: t1 must be positive");
  // The quadratic continuation keeps the barriers only where W is convex.
  for (int k = 0; k <= 1000; ++k) {
    const double s = t1 + 10.0 * t1 * k / 1000.0;
    if (!(w.second_derivative(s) > 0.0) || !(w.second_derivative(-s) > 0.0)) {
      throw Rejection("truncate: W'' must be positive outside [-t1, t1]");
    }
  }
  const double s_plus = first_grid_point(t1, +1.0, options.grid_step, options.search_bound,
                                         [&](double s) { return w.derivative(s) / epsilon > lambda_star; });
  const double s_minus = first_grid_point(-t1, -1.0, options.grid_step, options.search_bound,
                                          [&](double s) { return w.derivative(s) / epsilon < -lambda_star; });
  TruncatedPotential result(w, s_minus, s_plus);
  if (!barrier_holds(result, epsilon, lambda_star)) {
    throw Rejection("truncate: barrier inequalities fail on the verification grid");
  }
  return result;
}

bool barrier_holds(const TruncatedPotential& w, double epsilon, double lambda_star, int samples, double span) {
  for (int k = 0; k < samples; ++k) {
    const double frac = static_cast<double>(k) / (samples - 1);
    const double lo = w.s_minus() - span * frac;
    const double hi = w.s_plus() + span * frac;
    if (!(-w.derivative(lo) / epsilon - lambda_star > 0.0)) return false;
    if (!(-w.derivative(hi) / epsilon + lambda_star < 0.0)) return false;
  }
  return true;
}

}  // namespace cahnlab

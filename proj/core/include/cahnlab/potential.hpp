#pragma once

#include <string>
#include <vector>

namespace cahnlab {

/// Scalar double-well style potential with two derivatives.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual double value(double s) const = 0;
  virtual double derivative(double s) const = 0;
  virtual double second_derivative(double s) const = 0;
  virtual std::string id() const = 0;
};

/// Dense polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double x) const;
  Polynomial derivative() const;
  Polynomial scaled(double factor) const;
  const std::vector<double>& coefficients() const { return coeffs_; }
  int degree() const { return coeffs_.empty() ? -1 : static_cast<int>(coeffs_.size()) - 1; }

 private:
  std::vector<double> coeffs_;
};

/// |W'(s)| <= A + B |s|^(p-1).
struct GrowthBound {
  double A = 0.0;
  double B = 0.0;
  double p = 0.0;
};

/// c1 |t|^p1 < W(t) < c2 |t|^p2 for |t| >= t0.
struct TailBound {
  double c1 = 0.0;
  double c2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double t0 = 0.0;
};

class DoubleWell final : public Potential {
 public:
  DoubleWell(Polynomial w, GrowthBound growth, TailBound tail, double barrier_delta, std::string id);

  /// W(s) = s^2 (1 - s)^2 with its recorded growth constants.
  static DoubleWell quartic();
  /// W = 0. Violates the well assumptions; used for degenerate-profile checks.
  static DoubleWell zero();

  double value(double s) const override { return w_(s); }
  double derivative(double s) const override { return dw_(s); }
  double second_derivative(double s) const override { return d2w_(s); }
  std::string id() const override { return id_; }

  const Polynomial& polynomial() const { return w_; }
  const GrowthBound& growth() const { return growth_; }
  const TailBound& tail() const { return tail_; }
  double barrier_delta() const { return delta_; }

  /// The same potential multiplied by `factor` (bounds scaled accordingly).
  DoubleWell scaled(double factor) const;

 private:
  Polynomial w_, dw_, d2w_;
  GrowthBound growth_;
  TailBound tail_;
  double delta_;
  std::string id_;
};

struct AssumptionReport {
  bool wells = false;        // zeros and minima at 0 and 1, maximum at 1/2
  bool growth = false;       // |W'| <= A + B|s|^(p-1)
  bool barrier = false;      // W' > 0 on (1, 1+delta]
  bool tail = false;         // c1|t|^p1 < W < c2|t|^p2
  bool exponents = false;    // 2 < p1 <= p2 <= 2(p1 - 1)
  std::vector<std::string> failures;
  bool all() const { return wells && growth && barrier && tail && exponents; }
};

struct AssumptionGrid {
  double range = 100.0;
  int samples = 20001;
};

/// Grid-based verification of the double-well assumptions. The critical-exponent
/// bound on p1 is vacuous on surfaces and is not checked.
AssumptionReport check_assumptions(const DoubleWell& w, const AssumptionGrid& grid = {});

/// Surface tension: integral of sqrt(2 W) over [alpha, beta], relative error <= 1e-10.
double sigma(const Potential& w, double alpha, double beta);

/// Double well that agrees with `base` on [s_minus, s_plus] and continues as
/// its second-order Taylor polynomial beyond each junction.
class TruncatedPotential final : public Potential {
 public:
  TruncatedPotential(const DoubleWell& base, double s_minus, double s_plus);

  double value(double s) const override;
  double derivative(double s) const override;
  double second_derivative(double s) const override;
  std::string id() const override;

  const DoubleWell& base() const { return base_; }
  double s_minus() const { return s_minus_; }
  double s_plus() const { return s_plus_; }

 private:
  DoubleWell base_;
  double s_minus_, s_plus_;
  double wm_[3], wp_[3];  // W, W', W'' at the junctions
};

struct TruncationOptions {
  double grid_step = 1e-3;
  double search_bound = 1e6;
};

/// Chooses the junctions from the barrier inequalities
///   (1/eps) W'(s+) > lambda_star,   (1/eps) W'(s-) < -lambda_star
/// with s+ the first grid point >= t1 and s- the first grid point <= -t1.
TruncatedPotential truncate(const DoubleWell& w, double epsilon, double lambda_star, double t1,
                            const TruncationOptions& options = {});

/// Checks both barrier inequalities on `samples` points in [s- - span, s-] and [s+, s+ + span].
bool barrier_holds(const TruncatedPotential& w, double epsilon, double lambda_star,
                   int samples = 200, double span = 10.0);

}  // namespace cahnlab

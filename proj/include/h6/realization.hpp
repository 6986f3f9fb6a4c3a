#pragma once

#include <vector>

#include <Eigen/Dense>

#include "h6/algebra.hpp"
#include "h6/error.hpp"

namespace h6 {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Canonical coordinates of an N degree-of-freedom system.
struct PhaseState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;

  PhaseState() = default;
  PhaseState(Eigen::VectorXd q_, Eigen::VectorXd p_);
  PhaseState(std::initializer_list<double> q_, std::initializer_list<double> p_);

  int dof() const { return static_cast<int>(q.size()); }
  bool finite() const { return q.allFinite() && p.allFinite(); }

  /// (q1..qN, p1..pN).
  Eigen::VectorXd packed() const;
  static PhaseState unpack(const Eigen::VectorXd& z);
};

/// Site labels lambda_1..lambda_N; requires sum of squares > 0.
class RealizationParams {
 public:
  explicit RealizationParams(Eigen::VectorXd lambda);
  RealizationParams(std::initializer_list<double> lambda);

  int dof() const { return static_cast<int>(lambda_.size()); }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  double operator[](int i) const { return lambda_[i]; }
  /// M = sum of lambda_i^2.
  double M() const { return lambda_.squaredNorm(); }

 private:
  Eigen::VectorXd lambda_;
};

/// Generator values plus their exact derivatives; jacobian columns are
/// (q1..qN, p1..pN).
struct GeneratorFrame {
  H6Point values;
  Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian;
};

/// Generators restricted to the 0-based half-open site window [first, last).
/// Works for any scalar type (doubles, dual numbers).
template <typename Scalar>
BasicH6Point<Scalar> realize_window(const Vector<Scalar>& q, const Vector<Scalar>& p,
                                    const Eigen::VectorXd& lambda, int first, int last) {
  Scalar k(0), ap(0), am(0), bp(0), bm(0);
  double m = 0;
  for (int i = first; i < last; ++i) {
    const double l = lambda[i];
    ap += p[i] * Scalar(l);
    am += q[i] * Scalar(l);
    k += q[i] * p[i] - Scalar(0.5 * l * l);
    bp += p[i] * p[i];
    bm += q[i] * q[i];
    m += l * l;
  }
  return BasicH6Point<Scalar>(k, ap, am, bp, bm, Scalar(m));
}

void check_compatible(const PhaseState& s, const RealizationParams& lambda);

H6Point realize(const PhaseState& s, const RealizationParams& lambda);
GeneratorFrame realize_with_gradients(const PhaseState& s, const RealizationParams& lambda);
/// Sites a..b, 1-based and inclusive.
H6Point realize_sites(const PhaseState& s, const RealizationParams& lambda, int a, int b);

}  // namespace h6

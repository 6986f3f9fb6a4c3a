#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include <Eigen/Dense>

namespace h6 {

/// First-order forward-mode dual number carrying a dense gradient.
///
/// A `Dual` holds a value and its partial derivatives with respect to a fixed,
/// caller-chosen list of independent variables. Operands combined in one
/// expression must carry tangents of the same length; a zero-length tangent
/// stands for a constant and broadcasts against any length.
template <typename Scalar>
class Dual {
 public:
  using Tangent = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Dual() : value_(0) {}
  Dual(Scalar value) : value_(value) {}  // NOLINT: implicit constants are the point
  Dual(Scalar value, Tangent tangent) : value_(value), tangent_(std::move(tangent)) {}

  /// Independent variable number `index` out of `count`.
  static Dual variable(Scalar value, Eigen::Index index, Eigen::Index count) {
    Tangent t = Tangent::Zero(count);
    t[index] = Scalar(1);
    return Dual(value, std::move(t));
  }

  Scalar value() const { return value_; }
  const Tangent& tangent() const { return tangent_; }
  bool is_constant() const { return tangent_.size() == 0; }

  /// Gradient padded to `count` entries (constants give a zero vector).
  Tangent gradient(Eigen::Index count) const {
    return is_constant() ? Tangent::Zero(count) : tangent_;
  }

  Dual operator-() const { return Dual(-value_, is_constant() ? Tangent() : Tangent(-tangent_)); }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  /// a*t1 + b*t2 with the constant-broadcast rule.
  static Tangent combine(Scalar a, const Dual& x, Scalar b, const Dual& y) {
    if (x.is_constant() && y.is_constant()) return Tangent();
    if (x.is_constant()) return b * y.tangent_;
    if (y.is_constant()) return a * x.tangent_;
    return a * x.tangent_ + b * y.tangent_;
  }

  /// f(x) with f'(x) = slope.
  Dual chain(Scalar value, Scalar slope) const {
    return Dual(value, is_constant() ? Tangent() : Tangent(slope * tangent_));
  }

  friend Dual operator+(const Dual& x, const Dual& y) {
    return Dual(x.value_ + y.value_, combine(1, x, 1, y));
  }
  friend Dual operator-(const Dual& x, const Dual& y) {
    return Dual(x.value_ - y.value_, combine(1, x, -1, y));
  }
  friend Dual operator*(const Dual& x, const Dual& y) {
    return Dual(x.value_ * y.value_, combine(y.value_, x, x.value_, y));
  }
  friend Dual operator/(const Dual& x, const Dual& y) {
    const Scalar inv = Scalar(1) / y.value_;
    const Scalar v = x.value_ * inv;
    return Dual(v, combine(inv, x, -v * inv, y));
  }

 private:
  Scalar value_;
  Tangent tangent_;
};

template <typename Scalar>
Dual<Scalar> sin(const Dual<Scalar>& x) {
  using std::cos;
  using std::sin;
  return x.chain(sin(x.value()), cos(x.value()));
}

template <typename Scalar>
Dual<Scalar> cos(const Dual<Scalar>& x) {
  using std::cos;
  using std::sin;
  return x.chain(cos(x.value()), -sin(x.value()));
}

template <typename Scalar>
Dual<Scalar> exp(const Dual<Scalar>& x) {
  using std::exp;
  const Scalar e = exp(x.value());
  return x.chain(e, e);
}

template <typename Scalar>
Dual<Scalar> log(const Dual<Scalar>& x) {
  using std::log;
  return x.chain(log(x.value()), Scalar(1) / x.value());
}

template <typename Scalar>
Dual<Scalar> sqrt(const Dual<Scalar>& x) {
  using std::sqrt;
  const Scalar r = sqrt(x.value());
  return x.chain(r, Scalar(0.5) / r);
}

template <typename Scalar>
Dual<Scalar> abs(const Dual<Scalar>& x) {
  using std::abs;
  const Scalar s = x.value() > 0 ? Scalar(1) : (x.value() < 0 ? Scalar(-1) : Scalar(0));
  return x.chain(abs(x.value()), s);
}

/// x^y. The logarithmic term is only formed when the exponent varies.
template <typename Scalar>
Dual<Scalar> pow(const Dual<Scalar>& x, const Dual<Scalar>& y) {
  using std::log;
  using std::pow;
  const Scalar v = pow(x.value(), y.value());
  const Scalar dx = y.value() == Scalar(0) ? Scalar(0) : y.value() * pow(x.value(), y.value() - 1);
  if (y.is_constant()) return x.chain(v, dx);
  const Scalar dy = v == Scalar(0) ? Scalar(0) : v * log(x.value());
  return Dual<Scalar>(v, Dual<Scalar>::combine(dx, x, dy, y));
}

template <typename Scalar>
Scalar value_of(const Dual<Scalar>& x) {
  return x.value();
}
inline double value_of(double x) { return x; }
inline long double value_of(long double x) { return x; }

}  // namespace h6

namespace Eigen {

template <typename Scalar>
struct NumTraits<h6::Dual<Scalar>> : NumTraits<Scalar> {
  using Real = h6::Dual<Scalar>;
  using NonInteger = h6::Dual<Scalar>;
  using Nested = h6::Dual<Scalar>;
  using Literal = h6::Dual<Scalar>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3
  };
};

}  // namespace Eigen

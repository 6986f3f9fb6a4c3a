#pragma once

#include <optional>
#include <vector>

#include "h6/algebra.hpp"
#include "h6/realization.hpp"

namespace h6 {

/// Poles of the rational Casimirs: |denominator| below this is singular.
inline constexpr double kSingularDenominator = 1e-8;

/// J_ij = q_i p_j - q_j p_i (0-based indices, any order, so J_ji = -J_ij).
template <typename Scalar>
Scalar angular_momentum_t(const Vector<Scalar>& q, const Vector<Scalar>& p, int i, int j) {
  return q[i] * p[j] - q[j] * p[i];
}

/// Sum over i<j<k in the 0-based window [first, last) of
/// (lambda_i J_jk + lambda_j J_ki + lambda_k J_ij)^2.
template <typename Scalar>
Scalar triple_sum_t(const Vector<Scalar>& q, const Vector<Scalar>& p, const Eigen::VectorXd& lambda,
                    int first, int last) {
  Scalar total(0);
  for (int i = first; i < last; ++i)
    for (int j = i + 1; j < last; ++j)
      for (int k = j + 1; k < last; ++k) {
        const Scalar t = Scalar(lambda[i]) * angular_momentum_t(q, p, j, k) +
                         Scalar(lambda[j]) * angular_momentum_t(q, p, k, i) +
                         Scalar(lambda[k]) * angular_momentum_t(q, p, i, j);
        total += t * t;
      }
  return total;
}

/// Closed-form N-site Casimir of a subalgebra.
template <typename Scalar>
Scalar subalgebra_integral_t(Subalgebra sub, const Vector<Scalar>& q, const Vector<Scalar>& p,
                             const Eigen::VectorXd& lambda, const std::optional<EParams>& e) {
  const int n = static_cast<int>(q.size());
  auto pair_sum = [&](auto&& term) {
    Scalar total(0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) total += term(i, j);
    return total;
  };
  auto dp = [&](int i, int j) { return Scalar(lambda[j]) * p[i] - Scalar(lambda[i]) * p[j]; };
  auto dq = [&](int i, int j) { return Scalar(lambda[j]) * q[i] - Scalar(lambda[i]) * q[j]; };
  auto ratio = [&](const Vector<Scalar>& v, const char* what) {
    Scalar num(0), den(0);
    for (int i = 0; i < n; ++i) {
      num += Scalar(lambda[i]) * v[i];
      den += v[i] * v[i];
    }
    using std::abs;
    if (abs(static_cast<double>(value_of(den))) < kSingularDenominator)
      throw SingularityError(std::string("Casimir denominator ") + what + " vanishes");
    return num * num / den;
  };
  switch (sub) {
    case Subalgebra::Dp:
      return ratio(p, "B+");
    case Subalgebra::Dm:
      return ratio(q, "B-");
    case Subalgebra::h4:
      return pair_sum([&](int i, int j) { return dp(i, j) * dq(i, j); });
    case Subalgebra::Gp:
      return pair_sum([&](int i, int j) { return dp(i, j) * dp(i, j); });
    case Subalgebra::Gm:
      return pair_sum([&](int i, int j) { return dq(i, j) * dq(i, j); });
    case Subalgebra::E: {
      if (!e) throw ConfigError("subalgebra E requires parameters mu and nu");
      const Scalar mu(e->mu), nu(e->nu);
      return pair_sum(
          [&](int i, int j) { return mu * dp(i, j) * dp(i, j) + nu * dq(i, j) * dq(i, j); });
    }
    case Subalgebra::gl2:
      return pair_sum([&](int i, int j) {
        const Scalar jij = angular_momentum_t(q, p, j, i);
        return jij * jij;
      });
  }
  return Scalar(0);
}

/// 1-based J_ij, 1 <= i < j <= N.
double angular_momentum(const PhaseState& s, int i, int j);

/// C^(m): left window, sites 1..m. m = 2 gives 0.
double left_integral(int m, const PhaseState& s, const RealizationParams& lambda);
/// C_(m): right window, sites N-m+1..N.
double right_integral(int m, const PhaseState& s, const RealizationParams& lambda);

/// C_h6 evaluated on the m-site coproduct (sites 1..m). Computed through the
/// generator-space Casimir, independent of the triple-sum formula.
double coproduct_casimir(int m, const PhaseState& s, const RealizationParams& lambda);
/// Same on the right window.
double right_coproduct_casimir(int m, const PhaseState& s, const RealizationParams& lambda);

/// M^(m) = sum_{i <= m} lambda_i^2.
double trivial_integral(int m, const RealizationParams& lambda);

double subalgebra_integral(Subalgebra sub, const PhaseState& s, const RealizationParams& lambda,
                           const std::optional<EParams>& e = std::nullopt);

/// |M C_h6 - (C_Gp C_Gm - C_h4^2)| with the Heisenberg Casimir taken as M.
double casimir_identity_residual(const PhaseState& s, const RealizationParams& lambda);

enum class IntegralKind { Left, Right };

struct IntegralValue {
  int m;
  int first_site;  // 1-based, inclusive
  int last_site;
  double value;
};

struct IntegralSet {
  IntegralKind kind;
  std::vector<IntegralValue> values;  // m = 3..N
};

IntegralSet left_integrals(const PhaseState& s, const RealizationParams& lambda);
IntegralSet right_integrals(const PhaseState& s, const RealizationParams& lambda);

}  // namespace h6

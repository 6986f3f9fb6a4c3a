#include "h6/integrals.hpp"

#include <cmath>
#include <string>

namespace h6 {

namespace {

void check_window(int m, int n) {
  if (m < 2 || m > n)
    throw Error("integral order m = " + std::to_string(m) + " outside 2.." + std::to_string(n));
}

double casimir_on(const H6Point& g) {
  static const CompiledExpr ch6(casimir_Ch6(), generator_context());
  return ch6.value(std::span<const double>(g.coords.data(), 6));
}

}  // namespace

double angular_momentum(const PhaseState& s, int i, int j) {
  if (i < 1 || j <= i || j > s.dof())
    throw Error("angular momentum indices (" + std::to_string(i) + ", " + std::to_string(j) +
                ") need 1 <= i < j <= " + std::to_string(s.dof()));
  return angular_momentum_t<double>(s.q, s.p, i - 1, j - 1);
}

double left_integral(int m, const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  check_window(m, s.dof());
  return triple_sum_t<double>(s.q, s.p, lambda.lambda(), 0, m);
}

double right_integral(int m, const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  check_window(m, s.dof());
  return triple_sum_t<double>(s.q, s.p, lambda.lambda(), s.dof() - m, s.dof());
}

double coproduct_casimir(int m, const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  check_window(m, s.dof());
  return casimir_on(realize_sites(s, lambda, 1, m));
}

double right_coproduct_casimir(int m, const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  check_window(m, s.dof());
  return casimir_on(realize_sites(s, lambda, s.dof() - m + 1, s.dof()));
}

double trivial_integral(int m, const RealizationParams& lambda) {
  if (m < 1 || m > lambda.dof())
    throw Error("trivial integral order m = " + std::to_string(m) + " outside 1.." +
                std::to_string(lambda.dof()));
  return lambda.lambda().head(m).squaredNorm();
}

double subalgebra_integral(Subalgebra sub, const PhaseState& s, const RealizationParams& lambda,
                           const std::optional<EParams>& e) {
  check_compatible(s, lambda);
  return subalgebra_integral_t<double>(sub, s.q, s.p, lambda.lambda(), e);
}

double casimir_identity_residual(const PhaseState& s, const RealizationParams& lambda) {
  const double lhs = lambda.M() * casimir_on(realize(s, lambda));
  const double gp = subalgebra_integral(Subalgebra::Gp, s, lambda);
  const double gm = subalgebra_integral(Subalgebra::Gm, s, lambda);
  const double h4 = subalgebra_integral(Subalgebra::h4, s, lambda);
  return std::abs(lhs - (gp * gm - h4 * h4));
}

IntegralSet left_integrals(const PhaseState& s, const RealizationParams& lambda) {
  IntegralSet set{IntegralKind::Left, {}};
  for (int m = 3; m <= s.dof(); ++m) set.values.push_back({m, 1, m, left_integral(m, s, lambda)});
  return set;
}

IntegralSet right_integrals(const PhaseState& s, const RealizationParams& lambda) {
  IntegralSet set{IntegralKind::Right, {}};
  const int n = s.dof();
  for (int m = 3; m <= n; ++m)
    set.values.push_back({m, n - m + 1, n, right_integral(m, s, lambda)});
  return set;
}

}  // namespace h6

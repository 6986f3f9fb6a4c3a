#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "h6/algebra.hpp"
#include "h6/dual.hpp"
#include "h6/expr.hpp"
#include "h6/realization.hpp"

namespace h6 {

/// |B+| or |B-| below this counts as approaching a rational Casimir pole
/// during sampling and integration.
inline constexpr double kSingularityGuard = 1e-3;

/// A smooth function on the 2N-dimensional phase space with exact gradient.
/// Gradients are ordered (d/dq1..d/dqN, d/dp1..d/dpN).
class Observable {
 public:
  using Evaluator = std::function<ValueGradient(const PhaseState&)>;
  using ValueFn = std::function<double(const PhaseState&)>;
  /// Returns a diagnostic when `s` is too close to a singular set.
  using Guard = std::function<std::optional<std::string>(const PhaseState&)>;

  Observable(std::string name, int dof, Evaluator eval, ValueFn value = {}, Guard guard = {});

  const std::string& name() const { return name_; }
  int dof() const { return dof_; }

  ValueGradient evaluate(const PhaseState& s) const;
  double value(const PhaseState& s) const;
  std::optional<std::string> singularity(const PhaseState& s) const;

  /// Generator-space expression this observable realizes, when it has one.
  const std::optional<Expr>& generator_expr() const { return expr_; }
  Observable with_generator_expr(Expr e) const;
  Observable renamed(std::string name) const;

 private:
  void check(const PhaseState& s) const;

  std::string name_;
  int dof_;
  Evaluator eval_;
  ValueFn value_;
  Guard guard_;
  std::optional<Expr> expr_;
};

/// Wraps a functor `f(q, p)` that is generic over the scalar type. Values use
/// doubles; gradients use dual numbers over the 2N coordinates.
template <typename F>
Observable make_observable(std::string name, int dof, F f, Observable::Guard guard = {}) {
  auto eval = [f, dof](const PhaseState& s) {
    using D = Dual<double>;
    const Eigen::Index n2 = 2 * dof;
    Vector<D> q(dof), p(dof);
    for (int i = 0; i < dof; ++i) {
      q[i] = D::variable(s.q[i], i, n2);
      p[i] = D::variable(s.p[i], dof + i, n2);
    }
    const D r = f(q, p);
    return ValueGradient{r.value(), r.gradient(n2)};
  };
  auto value = [f](const PhaseState& s) -> double { return f(s.q, s.p); };
  return Observable(std::move(name), dof, std::move(eval), std::move(value), std::move(guard));
}

/// E composed with the N-particle realization. `e` is over `extended_context()`;
/// Casimir symbols are realized through their generator-space formulas.
Observable compose(const Expr& e, const RealizationParams& lambda,
                   const std::optional<EParams>& e_params = std::nullopt, std::string name = "");

Observable generator_observable(Generator g, const RealizationParams& lambda);
Observable coordinate_q(int i, int dof);  // 1-based
Observable coordinate_p(int i, int dof);
Observable angular_momentum_observable(int i, int j, int dof);  // 1-based
Observable left_integral_observable(int m, const RealizationParams& lambda);
Observable right_integral_observable(int m, const RealizationParams& lambda);
Observable trivial_integral_observable(int m, const RealizationParams& lambda);
/// Closed-form N-site subalgebra Casimir.
Observable subalgebra_integral_observable(Subalgebra sub, const RealizationParams& lambda,
                                          const std::optional<EParams>& e = std::nullopt);

/// Canonical bracket sum_i (df/dq_i dg/dp_i - dg/dq_i df/dp_i).
double bracket(const Observable& f, const Observable& g, const PhaseState& s);

inline constexpr double kDefaultFdStep = 1e-6;

/// Central-difference gradient from values only.
Eigen::VectorXd fd_gradient(const Observable& f, const PhaseState& s, double h = kDefaultFdStep);
/// Canonical bracket from finite-difference gradients.
double fd_bracket(const Observable& f, const Observable& g, const PhaseState& s,
                  double h = kDefaultFdStep);

}  // namespace h6

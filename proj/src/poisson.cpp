#include "h6/poisson.hpp"

#include <cmath>
#include <sstream>

#include "h6/integrals.hpp"

namespace h6 {

Observable::Observable(std::string name, int dof, Evaluator eval, ValueFn value, Guard guard)
    : name_(std::move(name)), dof_(dof), eval_(std::move(eval)), value_(std::move(value)),
      guard_(std::move(guard)) {
  if (dof_ < 1) throw Error("observable '" + name_ + "' needs at least one degree of freedom");
}

void Observable::check(const PhaseState& s) const {
  if (s.dof() != dof_)
    throw Error("observable '" + name_ + "' is defined for " + std::to_string(dof_) +
                " degrees of freedom, state has " + std::to_string(s.dof()));
}

ValueGradient Observable::evaluate(const PhaseState& s) const {
  check(s);
  return eval_(s);
}

double Observable::value(const PhaseState& s) const {
  check(s);
  return value_ ? value_(s) : eval_(s).value;
}

std::optional<std::string> Observable::singularity(const PhaseState& s) const {
  if (!guard_) return std::nullopt;
  check(s);
  return guard_(s);
}

Observable Observable::with_generator_expr(Expr e) const {
  Observable o = *this;
  o.expr_ = std::move(e);
  return o;
}

Observable Observable::renamed(std::string name) const {
  Observable o = *this;
  o.name_ = std::move(name);
  return o;
}

namespace {

Observable::Guard denominator_guard(std::vector<Generator> gens, RealizationParams lambda) {
  if (gens.empty()) return {};
  return [gens = std::move(gens), lambda = std::move(lambda)](const PhaseState& s)
             -> std::optional<std::string> {
    const H6Point g = realize(s, lambda);
    for (Generator x : gens)
      if (std::abs(g[x]) < kSingularityGuard) {
        std::ostringstream msg;
        msg << "singularity approach: |" << symbol_name(x) << "| = " << std::abs(g[x]) << " < "
            << kSingularityGuard;
        return msg.str();
      }
    return std::nullopt;
  };
}

}  // namespace

Observable compose(const Expr& e, const RealizationParams& lambda,
                   const std::optional<EParams>& e_params, std::string name) {
  auto compiled = std::make_shared<const CompiledExpr>(e, extended_context());
  auto ext = std::make_shared<const ExtendedSymbols>(e.symbols(), e_params);
  if (name.empty()) name = to_string(e);
  auto eval = [compiled, ext, lambda](const PhaseState& s) {
    const GeneratorFrame frame = realize_with_gradients(s, lambda);
    Eigen::VectorXd vals;
    Eigen::Matrix<double, Eigen::Dynamic, 6> jac;
    ext->evaluate(frame.values, vals, jac);
    const ValueGradient outer = compiled->value_gradient(std::span<const double>(vals.data(), vals.size()));
    const Eigen::Matrix<double, 1, 6> d_gen = outer.gradient.transpose() * jac;
    return ValueGradient{outer.value, (d_gen * frame.jacobian).transpose()};
  };
  auto value = [compiled, ext, lambda](const PhaseState& s) {
    const Eigen::VectorXd vals = ext->values(realize(s, lambda));
    return compiled->value(std::span<const double>(vals.data(), vals.size()));
  };
  Observable obs(std::move(name), lambda.dof(), std::move(eval), std::move(value),
                 denominator_guard(ext->denominators(), lambda));
  return obs.with_generator_expr(e);
}

Observable generator_observable(Generator g, const RealizationParams& lambda) {
  return compose(Expr::symbol(std::string(symbol_name(g))), lambda);
}

Observable coordinate_q(int i, int dof) {
  if (i < 1 || i > dof) throw Error("coordinate index out of range");
  return make_observable("q" + std::to_string(i), dof,
                         [i](const auto& q, const auto&) { return q[i - 1]; });
}

Observable coordinate_p(int i, int dof) {
  if (i < 1 || i > dof) throw Error("coordinate index out of range");
  return make_observable("p" + std::to_string(i), dof,
                         [i](const auto&, const auto& p) { return p[i - 1]; });
}

Observable angular_momentum_observable(int i, int j, int dof) {
  if (i < 1 || j <= i || j > dof) throw Error("angular momentum indices need 1 <= i < j <= N");
  return make_observable("J[" + std::to_string(i) + "," + std::to_string(j) + "]", dof,
                         [i, j](const auto& q, const auto& p) {
                           return angular_momentum_t(q, p, i - 1, j - 1);
                         });
}

Observable left_integral_observable(int m, const RealizationParams& lambda) {
  const int n = lambda.dof();
  if (m < 2 || m > n) throw Error("left integral order out of range");
  return make_observable("C_left[" + std::to_string(m) + "]", n,
                         [m, l = lambda.lambda()](const auto& q, const auto& p) {
                           return triple_sum_t(q, p, l, 0, m);
                         });
}

Observable right_integral_observable(int m, const RealizationParams& lambda) {
  const int n = lambda.dof();
  if (m < 2 || m > n) throw Error("right integral order out of range");
  return make_observable("C_right[" + std::to_string(m) + "]", n,
                         [m, n, l = lambda.lambda()](const auto& q, const auto& p) {
                           return triple_sum_t(q, p, l, n - m, n);
                         });
}

Observable trivial_integral_observable(int m, const RealizationParams& lambda) {
  const double value = trivial_integral(m, lambda);
  return make_observable("M[" + std::to_string(m) + "]", lambda.dof(),
                         [value](const auto& q, const auto&) {
                           using S = typename std::decay_t<decltype(q)>::Scalar;
                           return S(value);
                         });
}

Observable subalgebra_integral_observable(Subalgebra sub, const RealizationParams& lambda,
                                          const std::optional<EParams>& e) {
  if (sub == Subalgebra::E && !e) throw ConfigError("subalgebra E requires parameters mu and nu");
  std::vector<Generator> poles;
  if (sub == Subalgebra::Dp) poles = {Generator::Bp};
  if (sub == Subalgebra::Dm) poles = {Generator::Bm};
  return make_observable(
      "C_sub[" + std::string(subalgebra_name(sub)) + "]", lambda.dof(),
      [sub, e, l = lambda.lambda()](const auto& q, const auto& p) {
        return subalgebra_integral_t(sub, q, p, l, e);
      },
      denominator_guard(std::move(poles), lambda));
}

double bracket(const Observable& f, const Observable& g, const PhaseState& s) {
  const int n = s.dof();
  const ValueGradient a = f.evaluate(s);
  const ValueGradient b = g.evaluate(s);
  return a.gradient.head(n).dot(b.gradient.tail(n)) - b.gradient.head(n).dot(a.gradient.tail(n));
}

Eigen::VectorXd fd_gradient(const Observable& f, const PhaseState& s, double h) {
  if (!(h > 0)) throw Error("finite-difference step must be positive");
  const Eigen::VectorXd z = s.packed();
  Eigen::VectorXd grad(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    grad[i] = (f.value(PhaseState::unpack(zp)) - f.value(PhaseState::unpack(zm))) / (2 * h);
  }
  return grad;
}

double fd_bracket(const Observable& f, const Observable& g, const PhaseState& s, double h) {
  const int n = s.dof();
  const Eigen::VectorXd a = fd_gradient(f, s, h);
  const Eigen::VectorXd b = fd_gradient(g, s, h);
  return a.head(n).dot(b.tail(n)) - b.head(n).dot(a.tail(n));
}

}  // namespace h6

#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "h6/dual.hpp"
#include "h6/error.hpp"

namespace h6 {

/// Ordered set of admissible symbol names. The order fixes the layout of
/// bindings and gradients.
class SymbolContext {
 public:
  SymbolContext() = default;
  explicit SymbolContext(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  bool operator==(const SymbolContext&) const = default;

 private:
  std::vector<std::string> names_;
};

enum class ExprKind { Constant, Symbol, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Log, Sqrt, Abs };

std::string_view function_name(Function f);
std::optional<Function> function_from_name(std::string_view name);

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr symbol(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr argument);

  ExprKind kind() const;
  double constant_value() const;         // Constant only
  const std::string& symbol_name() const;  // Symbol only
  Function function() const;             // Call only
  std::size_t arity() const;
  const Expr& child(std::size_t i) const;

  /// Names of all symbols occurring in the tree.
  std::set<std::string> symbols() const;
  std::size_t depth() const;

  bool operator==(const Expr& other) const;  // structural

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;
  std::string name;
  Function function = Function::Sin;
  std::vector<Expr> children;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);

/// Replaces every symbol named in `replacements` by its expression.
Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

/// Named numeric constants substituted while parsing.
using ConstantTable = std::map<std::string, double, std::less<>>;

/// Parses infix text. Precedence: `^` (right-assoc) > unary `-` > `* /` >
/// `+ -`. Function calls: sin cos exp log sqrt abs. Every identifier must be
/// in `ctx` or `constants`.
Expr parse(std::string_view text, const SymbolContext& ctx, const ConstantTable& constants = {});

/// Canonical text form; `parse(to_string(e))` rebuilds a tree equal to `e`
/// for any tree produced by `parse`.
std::string to_string(const Expr& e);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

struct ValueGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// An expression bound to a symbol context, flattened for repeated
/// evaluation. Thread-safe: evaluation does not mutate the object.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const SymbolContext& ctx);

  const SymbolContext& context() const { return ctx_; }
  const Expr& expr() const { return expr_; }

  double value(std::span<const double> bindings) const;
  ValueGradient value_gradient(std::span<const double> bindings) const;

  /// Generic evaluation over any scalar supporting the six functions.
  template <typename Scalar>
  Scalar evaluate(std::span<const Scalar> bindings) const;

 private:
  struct Op {
    ExprKind kind;
    double value;
    std::size_t symbol;
    Function function;
    std::size_t node;  // index into subexprs_ for diagnostics
  };
  [[noreturn]] void domain_failure(const std::string& what, std::size_t node) const;

  Expr expr_;
  SymbolContext ctx_;
  std::vector<Op> program_;  // postfix
  std::vector<Expr> subexprs_;
};

/// Value and exact gradient (ordered as `ctx`). Throws `DomainError`.
ValueGradient eval_with_gradient(const Expr& e, const SymbolContext& ctx,
                                 std::span<const double> bindings);
ValueGradient eval_with_gradient(const Expr& e, const SymbolContext& ctx,
                                 const std::map<std::string, double>& bindings);
double evaluate(const Expr& e, const SymbolContext& ctx, std::span<const double> bindings);

// ---------------------------------------------------------------------------

namespace detail {

inline double as_double(double x) { return x; }
template <typename Scalar>
double as_double(const Dual<Scalar>& x) {
  return static_cast<double>(x.value());
}

}  // namespace detail

template <typename Scalar>
Scalar CompiledExpr::evaluate(std::span<const Scalar> bindings) const {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  if (bindings.size() != ctx_.size())
    throw Error("binding count " + std::to_string(bindings.size()) + " does not match context size " +
                std::to_string(ctx_.size()));
  std::vector<Scalar> stack;
  stack.reserve(program_.size());
  for (const Op& op : program_) {
    switch (op.kind) {
      case ExprKind::Constant:
        stack.emplace_back(Scalar(op.value));
        break;
      case ExprKind::Symbol:
        stack.push_back(bindings[op.symbol]);
        break;
      case ExprKind::Negate:
        stack.back() = -stack.back();
        break;
      case ExprKind::Call: {
        Scalar& x = stack.back();
        const double v = detail::as_double(x);
        switch (op.function) {
          case Function::Sin: x = sin(x); break;
          case Function::Cos: x = cos(x); break;
          case Function::Exp: x = exp(x); break;
          case Function::Log:
            if (!(v > 0)) domain_failure("log of non-positive value " + format_double(v), op.node);
            x = log(x);
            break;
          case Function::Sqrt:
            if (v < 0) domain_failure("sqrt of negative value " + format_double(v), op.node);
            if constexpr (!std::is_floating_point_v<Scalar>) {
              if (v == 0 && !x.is_constant()) domain_failure("sqrt derivative at 0", op.node);
            }
            x = sqrt(x);
            break;
          case Function::Abs: x = abs(x); break;
        }
        break;
      }
      default: {
        Scalar rhs = std::move(stack.back());
        stack.pop_back();
        Scalar& lhs = stack.back();
        switch (op.kind) {
          case ExprKind::Add: lhs = lhs + rhs; break;
          case ExprKind::Sub: lhs = lhs - rhs; break;
          case ExprKind::Mul: lhs = lhs * rhs; break;
          case ExprKind::Div:
            if (detail::as_double(rhs) == 0) domain_failure("division by zero", op.node);
            lhs = lhs / rhs;
            break;
          case ExprKind::Pow: {
            const double b = detail::as_double(lhs);
            const double e = detail::as_double(rhs);
            if (b < 0 && e != std::floor(e))
              domain_failure("negative base to non-integer power", op.node);
            if (b == 0 && e < 0) domain_failure("zero to negative power", op.node);
            if constexpr (!std::is_floating_point_v<Scalar>) {
              if (b <= 0 && !rhs.is_constant())
                domain_failure("variable exponent on non-positive base", op.node);
            }
            lhs = pow(lhs, rhs);
            break;
          }
          default: break;
        }
      }
    }
  }
  return stack.back();
}

}  // namespace h6

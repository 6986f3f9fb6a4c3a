#include "h6/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

namespace h6 {

// --- SymbolContext ---------------------------------------------------------

SymbolContext::SymbolContext(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw Error("duplicate symbol '" + names_[i] + "' in context");
}

std::optional<std::size_t> SymbolContext::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

// --- Expr ------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Function, std::string_view>, 6> kFunctions{{
    {Function::Sin, "sin"},
    {Function::Cos, "cos"},
    {Function::Exp, "exp"},
    {Function::Log, "log"},
    {Function::Sqrt, "sqrt"},
    {Function::Abs, "abs"},
}};

std::shared_ptr<Expr::Node> make_node(ExprKind kind) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  return n;
}

}  // namespace

std::string_view function_name(Function f) {
  for (const auto& [fn, name] : kFunctions)
    if (fn == f) return name;
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  for (const auto& [fn, n] : kFunctions)
    if (n == name) return fn;
  return std::nullopt;
}

Expr::Expr() : node_(make_node(ExprKind::Constant)) {}

Expr Expr::constant(double value) {
  auto n = make_node(ExprKind::Constant);
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::symbol(std::string name) {
  auto n = make_node(ExprKind::Symbol);
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = make_node(ExprKind::Negate);
  n->children.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  switch (kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Pow:
      break;
    default:
      throw Error("Expr::binary: not a binary kind");
  }
  auto n = make_node(kind);
  n->children = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr argument) {
  auto n = make_node(ExprKind::Call);
  n->function = f;
  n->children.push_back(std::move(argument));
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
const std::string& Expr::symbol_name() const { return node_->name; }
Function Expr::function() const { return node_->function; }
std::size_t Expr::arity() const { return node_->children.size(); }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }

std::set<std::string> Expr::symbols() const {
  std::set<std::string> out;
  std::vector<const Expr*> todo{this};
  while (!todo.empty()) {
    const Expr* e = todo.back();
    todo.pop_back();
    if (e->kind() == ExprKind::Symbol) out.insert(e->symbol_name());
    for (const Expr& c : e->node_->children) todo.push_back(&c);
  }
  return out;
}

std::size_t Expr::depth() const {
  std::size_t d = 0;
  for (const Expr& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case ExprKind::Constant:
      // bitwise, so that -0.0 and 0.0 (and NaN payloads) are told apart
      if (std::signbit(a.value) != std::signbit(b.value)) return false;
      if (!(a.value == b.value) && !(std::isnan(a.value) && std::isnan(b.value))) return false;
      break;
    case ExprKind::Symbol:
      if (a.name != b.name) return false;
      break;
    case ExprKind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!(a.children[i] == b.children[i])) return false;
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::negate(a); }
Expr pow(const Expr& base, const Expr& exponent) {
  return Expr::binary(ExprKind::Pow, base, exponent);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Symbol: {
      const auto it = replacements.find(e.symbol_name());
      return it == replacements.end() ? e : it->second;
    }
    case ExprKind::Negate:
      return Expr::negate(substitute(e.child(0), replacements));
    case ExprKind::Call:
      return Expr::call(e.function(), substitute(e.child(0), replacements));
    default:
      return Expr::binary(e.kind(), substitute(e.child(0), replacements),
                          substitute(e.child(1), replacements));
  }
}

// --- Parser ----------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolContext& ctx, const ConstantTable& constants)
      : text_(text), ctx_(ctx), constants_(constants) {}

  Expr run() {
    skip_space();
    if (at_end()) throw ParseError("empty expression", pos_);
    Expr e = expression();
    skip_space();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + term();
      else if (accept('-'))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = lhs * unary();
      else if (accept('/'))
        lhs = lhs / unary();
      else
        return lhs;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (peek() == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (peek() == 'e' || peek() == 'E') {
      const std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) pos_ = save;  // leave 'e' for the identifier rule to reject
    }
    double value = 0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (peek() == '(') {
      const auto fn = function_from_name(name);
      if (!fn) throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      Expr arg = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return Expr::call(*fn, std::move(arg));
    }
    if (ctx_.contains(name)) return Expr::symbol(name);
    if (const auto it = constants_.find(name); it != constants_.end())
      return Expr::constant(it->second);
    throw UnknownSymbolError(name);
  }

  std::string_view text_;
  const SymbolContext& ctx_;
  const ConstantTable& constants_;
  std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Negate:
      return 3;
    case ExprKind::Pow:
      return 4;
    case ExprKind::Constant:
      return e.constant_value() < 0 || std::signbit(e.constant_value()) ? 3 : 5;
    default:
      return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      const double v = e.constant_value();
      if (std::signbit(v)) {
        out += '-';
        out += format_double(-v);
      } else {
        out += format_double(v);
      }
      return;
    }
    case ExprKind::Symbol:
      out += e.symbol_name();
      return;
    case ExprKind::Negate:
      out += '-';
      print_wrapped(e.child(0), precedence(e.child(0)) < 3, out);
      return;
    case ExprKind::Call:
      out += function_name(e.function());
      out += '(';
      print(e.child(0), out);
      out += ')';
      return;
    case ExprKind::Pow:
      print_wrapped(e.child(0), precedence(e.child(0)) <= 4, out);
      out += '^';
      print_wrapped(e.child(1), precedence(e.child(1)) < 3, out);
      return;
    default: {
      const int p = precedence(e);
      const char* op = e.kind() == ExprKind::Add   ? " + "
                       : e.kind() == ExprKind::Sub ? " - "
                       : e.kind() == ExprKind::Mul ? "*"
                                                   : "/";
      print_wrapped(e.child(0), precedence(e.child(0)) < p, out);
      out += op;
      print_wrapped(e.child(1), precedence(e.child(1)) <= p, out);
    }
  }
}

}  // namespace

Expr parse(std::string_view text, const SymbolContext& ctx, const ConstantTable& constants) {
  return Parser(text, ctx, constants).run();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

// --- CompiledExpr ----------------------------------------------------------

CompiledExpr::CompiledExpr(const Expr& e, const SymbolContext& ctx) : expr_(e), ctx_(ctx) {
  // post-order flattening
  struct Frame {
    const Expr* e;
    bool expanded;
  };
  std::vector<Frame> todo{{&expr_, false}};
  while (!todo.empty()) {
    Frame f = todo.back();
    todo.pop_back();
    if (!f.expanded) {
      todo.push_back({f.e, true});
      for (std::size_t i = f.e->arity(); i-- > 0;) todo.push_back({&f.e->child(i), false});
      continue;
    }
    Op op{f.e->kind(), 0.0, 0, Function::Sin, subexprs_.size()};
    switch (f.e->kind()) {
      case ExprKind::Constant:
        op.value = f.e->constant_value();
        break;
      case ExprKind::Symbol: {
        const auto idx = ctx_.index_of(f.e->symbol_name());
        if (!idx) throw UnknownSymbolError(f.e->symbol_name());
        op.symbol = *idx;
        break;
      }
      case ExprKind::Call:
        op.function = f.e->function();
        break;
      default:
        break;
    }
    subexprs_.push_back(*f.e);
    program_.push_back(op);
  }
}

void CompiledExpr::domain_failure(const std::string& what, std::size_t node) const {
  throw DomainError(what + " in '" + to_string(subexprs_.at(node)) + "'");
}

double CompiledExpr::value(std::span<const double> bindings) const {
  return evaluate<double>(bindings);
}

ValueGradient CompiledExpr::value_gradient(std::span<const double> bindings) const {
  const auto n = static_cast<Eigen::Index>(ctx_.size());
  std::vector<Dual<double>> vars;
  vars.reserve(bindings.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(bindings.size()); ++i)
    vars.push_back(Dual<double>::variable(bindings[static_cast<std::size_t>(i)], i, n));
  const Dual<double> r = evaluate<Dual<double>>(vars);
  return {r.value(), r.gradient(n)};
}

ValueGradient eval_with_gradient(const Expr& e, const SymbolContext& ctx,
                                 std::span<const double> bindings) {
  return CompiledExpr(e, ctx).value_gradient(bindings);
}

ValueGradient eval_with_gradient(const Expr& e, const SymbolContext& ctx,
                                 const std::map<std::string, double>& bindings) {
  std::vector<double> values(ctx.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [name, v] : bindings) {
    const auto idx = ctx.index_of(name);
    if (!idx) throw UnknownSymbolError(name);
    values[*idx] = v;
  }
  for (const std::string& s : e.symbols())
    if (const auto idx = ctx.index_of(s); idx && !bindings.count(s))
      throw Error("no binding for symbol '" + s + "'");
  return eval_with_gradient(e, ctx, values);
}

double evaluate(const Expr& e, const SymbolContext& ctx, std::span<const double> bindings) {
  return CompiledExpr(e, ctx).value(bindings);
}

}  // namespace h6

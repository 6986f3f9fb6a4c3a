#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "h6/algebra.hpp"
#include "h6/expr.hpp"

using namespace h6;

namespace {

const SymbolContext& gens() { return generator_context(); }

double eval_at(const std::string& text, std::map<std::string, double> b) {
  return eval_with_gradient(parse(text, gens()), gens(), b).value;
}

// Random trees over every node kind, kept inside function domains.
Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> u(-3, 3);
  const char* syms[] = {"K", "Ap", "Am", "Bp", "Bm", "M"};
  if (depth <= 1) {
    if (pick(rng) < 7) return Expr::symbol(syms[pick(rng) % 6]);
    return Expr::constant(std::round(u(rng) * 1000) / 1000);
  }
  switch (pick(rng)) {
    case 0: return random_tree(rng, depth - 1) + random_tree(rng, depth - 1);
    case 1: return random_tree(rng, depth - 1) - random_tree(rng, depth - 1);
    case 2: return random_tree(rng, depth - 1) * random_tree(rng, depth - 1);
    case 3: return random_tree(rng, depth - 1) / (Expr::constant(5) + pow(random_tree(rng, depth - 1), Expr::constant(2)));
    case 4: return pow(random_tree(rng, depth - 1), Expr::constant(pick(rng) % 3 + 1));
    case 5: return -random_tree(rng, depth - 1);
    case 6: return Expr::call(Function::Sin, random_tree(rng, depth - 1));
    case 7: return Expr::call(Function::Exp, Expr::call(Function::Cos, random_tree(rng, depth - 1)));
    case 8: return Expr::call(Function::Sqrt, Expr::constant(1) + pow(random_tree(rng, depth - 1), Expr::constant(2)));
    default: return Expr::call(Function::Log, Expr::constant(2) + Expr::call(Function::Sin, random_tree(rng, depth - 1)));
  }
}

}  // namespace

TEST_CASE("symbol context rejects duplicates and keeps order") {
  CHECK_THROWS_AS(SymbolContext({"a", "b", "a"}), Error);
  const SymbolContext ctx({"x", "y"});
  CHECK(ctx.index_of("y") == 1u);
  CHECK_FALSE(ctx.contains("z"));
}

TEST_CASE("precedence and associativity") {
  const Expr e = parse("Am + Bm*K", gens());
  REQUIRE(e.kind() == ExprKind::Add);
  CHECK(e.child(0) == Expr::symbol("Am"));
  CHECK(e.child(1) == Expr::binary(ExprKind::Mul, Expr::symbol("Bm"), Expr::symbol("K")));

  CHECK(eval_at("2^3^2", {}) == 512);
  CHECK(eval_at("-2^2", {}) == -4);
  CHECK(eval_at("2^-1", {}) == 0.5);
  CHECK(eval_at("8/4/2", {}) == 1);
  CHECK(eval_at("1 - 2 - 3", {}) == -4);
  CHECK(eval_at("(1 - 2) * 3", {}) == -3);
  CHECK(eval_at("1.5e2 + .5", {}) == 150.5);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("K + ", gens());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(parse("", gens()), ParseError);
  CHECK_THROWS_AS(parse("(K", gens()), ParseError);
  CHECK_THROWS_AS(parse("K)", gens()), ParseError);
  CHECK_THROWS_AS(parse("K $ M", gens()), ParseError);
  CHECK_THROWS_AS(parse("tan(K)", gens()), ParseError);
  CHECK_THROWS_AS(parse("1..2", gens()), ParseError);
}

TEST_CASE("unknown symbols are named") {
  try {
    parse("K + Q7", gens());
    FAIL("expected an unknown-symbol error");
  } catch (const UnknownSymbolError& e) {
    CHECK(e.symbol() == "Q7");
  }
}

TEST_CASE("constants are substituted at parse time") {
  const Expr e = parse("a*Bp + b", gens(), {{"a", 2.0}, {"b", -1.0}});
  CHECK(e.symbols() == std::set<std::string>{"Bp"});
  CHECK(eval_at("2*Bp - 1", {{"Bp", 3}}) == evaluate(e, gens(), std::vector<double>{0, 0, 0, 3, 0, 0}));
}

TEST_CASE("value and exact gradient") {
  const ValueGradient a = eval_with_gradient(parse("Am^2", gens()), gens(), {{"Am", 3.0}});
  CHECK(a.value == 9);
  CHECK(a.gradient[2] == 6);
  const ValueGradient b = eval_with_gradient(parse("0.5*Bp", gens()), gens(), {{"Bp", 4.0}});
  CHECK(b.value == 2);
  CHECK(b.gradient[3] == 0.5);
  CHECK(b.gradient[0] == 0);
  CHECK_THROWS_AS(eval_with_gradient(parse("K", gens()), gens(), {{"Q", 1.0}}), Error);
}

TEST_CASE("domain errors report the subexpression") {
  auto message = [](const std::string& text, std::map<std::string, double> b) -> std::string {
    try {
      eval_with_gradient(parse(text, gens()), gens(), b);
    } catch (const DomainError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("1 + log(Bm)", {{"Bm", -1}}).find("log(Bm)") != std::string::npos);
  CHECK(message("sqrt(K - 2)", {{"K", 1}}).find("sqrt(K - 2)") != std::string::npos);
  CHECK(message("1/(Am - Am)", {{"Am", 1}}).find("Am - Am") != std::string::npos);
  CHECK(message("Bp^0.5", {{"Bp", -1}}) != "");
  CHECK(message("Bp^-1", {{"Bp", 0}}) != "");
  CHECK(message("sqrt(Bp)", {{"Bp", 0}}) != "");  // infinite slope
  CHECK(message("sqrt(Bp)", {{"Bp", 4}}) == "");
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Expr e = random_tree(rng, 1 + i % 5);
    const std::string text = to_string(e);
    const Expr back = parse(text, gens());
    CHECK_MESSAGE(to_string(back) == text, text);
    CHECK(parse(to_string(back), gens()) == back);
  }
  for (const char* text : {"Am + Bm*K", "-(K + M)^2", "K - (Am - Bm)", "K/(Am*Bm)", "2^3^2",
                           "(2^3)^2", "-K^2", "(-K)^2", "sin(-Bp)/-2", "a - -1"}) {
    const Expr e = parse(text, gens(), {{"a", 3.0}});
    CHECK(parse(to_string(e), gens()) == e);
  }
  CHECK(to_string(parse("Am + Bm*K", gens())) == "Am + Bm*K");
  CHECK(to_string(parse("(Am + Bm)*K", gens())) == "(Am + Bm)*K");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("gradients agree with central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_tree(rng, 4);
    const CompiledExpr c(e, gens());
    std::vector<double> x(6);
    for (double& v : x) v = u(rng);
    const ValueGradient vg = c.value_gradient(x);
    for (int k = 0; k < 6; ++k) {
      std::vector<double> xp = x, xm = x;
      xp[k] += 1e-6;
      xm[k] -= 1e-6;
      const double fd = (c.value(xp) - c.value(xm)) / 2e-6;
      CHECK_MESSAGE(std::abs(fd - vg.gradient[k]) <= 1e-5 * std::max(1.0, std::abs(vg.gradient[k])),
                    to_string(e));
      ++compared;
    }
  }
  CHECK(compared == 1800);
}

TEST_CASE("substitute replaces symbols structurally") {
  const SymbolContext ctx({"F", "Am", "Bm"});
  const Expr e = parse("2*F + F^2", ctx);
  const Expr r = substitute(e, {{"F", parse("Am*Bm", ctx)}});
  CHECK(r.symbols() == std::set<std::string>{"Am", "Bm"});
  CHECK(evaluate(r, ctx, std::vector<double>{0, 2, 3}) == 48);
}

TEST_CASE("depth of trees") {
  CHECK(parse("K", gens()).depth() == 1);
  CHECK(parse("K + M*Am", gens()).depth() == 3);
}

#include <doctest.h>

#include <cmath>

#include "h6/algebra.hpp"
#include "h6/integrals.hpp"
#include "h6/poisson.hpp"
#include "h6/verify.hpp"

using namespace h6;

namespace {

Observable obs(const std::string& text, const RealizationParams& l) {
  return compose(parse(text, extended_context()), l);
}

}  // namespace

TEST_CASE("canonical pairs") {
  const PhaseState s({0.3, -0.2}, {1.1, 0.4});
  CHECK(bracket(coordinate_q(1, 2), coordinate_p(1, 2), s) == 1);
  CHECK(bracket(coordinate_q(1, 2), coordinate_p(2, 2), s) == 0);
  CHECK(bracket(coordinate_p(2, 2), coordinate_q(2, 2), s) == -1);
  CHECK_THROWS_AS(coordinate_q(3, 2), Error);
  CHECK_THROWS_AS(coordinate_q(1, 2).evaluate(PhaseState({1.0}, {1.0})), Error);
}

TEST_CASE("realized generator brackets") {
  StateSampler rng(71);
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 5;
    const RealizationParams l = rng.lambda(n);
    const PhaseState s = rng.state(n);
    CHECK(bracket(generator_observable(Generator::Am, l), generator_observable(Generator::Ap, l), s) ==
          doctest::Approx(l.M()));
    CHECK(bracket(generator_observable(Generator::M, l), obs("K*Bp + Am", l), s) == 0);
  }
  const RealizationParams l2(Eigen::Vector2d(1, 1));
  const PhaseState s2({1.0, 0.0}, {0.0, 1.0});
  CHECK(bracket(generator_observable(Generator::Bm, l2), generator_observable(Generator::Bp, l2), s2) ==
        doctest::Approx(0));
}

TEST_CASE("composition is a homomorphism") {
  StateSampler rng(73);
  const std::vector<std::string> syms{"K", "Ap", "Am", "Bp", "Bm", "M"};
  for (int k = 0; k < 40; ++k) {
    const int n = 1 + k % 4;
    const RealizationParams l = rng.lambda(n);
    const Expr e1 = random_expr(rng, syms, 3);
    const Expr e2 = random_expr(rng, syms, 3);
    const PhaseState s = rng.state(n);
    const double via_algebra = lie_poisson_bracket(e1, e2, realize(s, l));
    const double via_phase = bracket(compose(e1, l), compose(e2, l), s);
    CHECK(std::abs(via_algebra - via_phase) <= 1e-9 * (1 + std::abs(via_algebra)));
  }
}

TEST_CASE("bilinearity, antisymmetry and Leibniz rule") {
  StateSampler rng(79);
  const std::vector<std::string> syms{"K", "Ap", "Am", "Bp", "Bm"};
  for (int k = 0; k < 30; ++k) {
    const RealizationParams l = rng.lambda(3);
    const Expr a = random_expr(rng, syms, 3), b = random_expr(rng, syms, 3), c = random_expr(rng, syms, 3);
    const PhaseState s = rng.state(3);
    const Observable fa = compose(a, l), fb = compose(b, l), fc = compose(c, l);
    const double ab = bracket(fa, fb, s), ac = bracket(fa, fc, s);
    const double va = fa.value(s), vb = fb.value(s), vc = fc.value(s);
    const double scale = 1 + std::abs(ab) + std::abs(ac) + std::abs(vb * ac) + std::abs(vc * ab);
    CHECK(std::abs(bracket(fb, fa, s) + ab) <= 1e-9 * scale);
    CHECK(std::abs(bracket(fa, compose(b + Expr::constant(2) * c, l), s) - (ab + 2 * ac)) <= 1e-9 * scale);
    CHECK(std::abs(bracket(fa, compose(b * c, l), s) - (ab * vc + vb * ac)) <= 1e-9 * scale);
    CHECK(std::abs(bracket(fa, fa, s)) <= 1e-12 * (1 + va * va));
  }
}

TEST_CASE("finite-difference oracle") {
  StateSampler rng(83);
  const RealizationParams l = rng.lambda(4);
  const Observable h = obs("Bp*(Am + 0.5*Bm + 1)", l);
  const Observable c = left_integral_observable(4, l);
  for (int k = 0; k < 20; ++k) {
    const PhaseState s = rng.state(4);
    const Eigen::VectorXd exact = h.evaluate(s).gradient;
    const Eigen::VectorXd fd = fd_gradient(h, s);
    CHECK((exact - fd).norm() <= 1e-5 * std::max(1.0, exact.norm()));
    const double b = bracket(h, coordinate_q(2, 4), s);
    CHECK(std::abs(b - fd_bracket(h, coordinate_q(2, 4), s)) <= 1e-5 * std::max(1.0, std::abs(b)));
    CHECK(std::abs(fd_bracket(c, c, s)) <= 1e-6);
  }
  CHECK_THROWS_AS(fd_gradient(h, rng.state(4), 0.0), Error);
}

TEST_CASE("built-in observables match their direct formulas") {
  StateSampler rng(89);
  const RealizationParams l = rng.lambda(5);
  const PhaseState s = rng.state(5);
  CHECK(left_integral_observable(4, l).value(s) == doctest::Approx(left_integral(4, s, l)));
  CHECK(right_integral_observable(3, l).value(s) == doctest::Approx(right_integral(3, s, l)));
  CHECK(angular_momentum_observable(2, 5, 5).value(s) == doctest::Approx(angular_momentum(s, 2, 5)));
  CHECK(trivial_integral_observable(3, l).evaluate(s).gradient.isZero());
  CHECK(subalgebra_integral_observable(Subalgebra::gl2, l).value(s) ==
        doctest::Approx(subalgebra_integral(Subalgebra::gl2, s, l)));
  CHECK(obs("C_gl2", l).value(s) == doctest::Approx(subalgebra_integral(Subalgebra::gl2, s, l)));
  CHECK(left_integral_observable(4, l).name() == "C_left[4]");
  CHECK(obs("K + 1", l).generator_expr().has_value());
}

TEST_CASE("singularity guard on rational casimirs") {
  const RealizationParams l(Eigen::Vector3d(1, 1, 1));
  const Observable h = obs("0.5*Bp + C_Dm", l);
  const auto hit = h.singularity(PhaseState({1e-4, 0.0, 0.0}, {1.0, 0.0, 0.0}));
  REQUIRE(hit.has_value());
  CHECK(hit->find("singularity approach") != std::string::npos);
  CHECK_FALSE(h.singularity(PhaseState({1.0, 0.0, 0.0}, {1.0, 0.0, 0.0})).has_value());
  CHECK_FALSE(obs("0.5*Bp", l).singularity(PhaseState({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0})).has_value());
  CHECK(subalgebra_integral_observable(Subalgebra::Dp, l)
            .singularity(PhaseState({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}))
            .has_value());
}

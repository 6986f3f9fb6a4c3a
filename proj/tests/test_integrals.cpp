#include <doctest.h>

#include <cmath>

#include "h6/integrals.hpp"
#include "h6/poisson.hpp"
#include "h6/verify.hpp"

using namespace h6;

namespace {

const PhaseState kS3({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
const RealizationParams kOnes3(Eigen::Vector3d(1, 1, 1));

double at(const Expr& e, const H6Point& g) {
  return evaluate(e, generator_context(), std::span<const double>(g.coords.data(), 6));
}

}  // namespace

TEST_CASE("angular momentum") {
  CHECK(angular_momentum(PhaseState({1.0, 0.0}, {0.0, 1.0}), 1, 2) == 1);
  CHECK(angular_momentum(PhaseState({1.0, 2.0}, {1.0, 2.0}), 1, 2) == 0);
  CHECK_THROWS_AS(angular_momentum(kS3, 2, 1), Error);
  const Eigen::Vector3d q(0.3, -1.1, 0.4), p(0.9, 0.2, -0.5);
  CHECK(angular_momentum_t<double>(q, p, 2, 0) == -angular_momentum_t<double>(q, p, 0, 2));
}

TEST_CASE("left and right integral fixtures") {
  CHECK(left_integral(2, kS3, kOnes3) == 0);
  CHECK(left_integral(3, kS3, kOnes3) == doctest::Approx(1));
  CHECK(left_integral(3, kS3, RealizationParams(Eigen::Vector3d(1, 2, 3))) == doctest::Approx(9));
  CHECK(coproduct_casimir(2, kS3, kOnes3) == doctest::Approx(0));
  CHECK(coproduct_casimir(3, kS3, kOnes3) == doctest::Approx(1));
  CHECK_THROWS_AS(left_integral(1, kS3, kOnes3), Error);
  CHECK_THROWS_AS(left_integral(4, kS3, kOnes3), Error);
  // Right window of size 2 is sites 2..3: q2 = q3 = 0, so everything vanishes.
  CHECK(right_integral(2, kS3, kOnes3) == 0);
}

TEST_CASE("trivial integrals") {
  CHECK(trivial_integral(2, kOnes3) == 2);
  const RealizationParams l(Eigen::Vector3d(0.5, 1.5, 2.0));
  CHECK(trivial_integral(3, l) == doctest::Approx(realize(kS3, l).M()));
  CHECK_THROWS_AS(trivial_integral(0, l), Error);
}

TEST_CASE("two-body casimir vanishes at random states") {
  StateSampler rng(31);
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 5;
    CHECK(std::abs(coproduct_casimir(2, rng.state(n), rng.lambda(n))) <= 1e-12);
  }
}

TEST_CASE("triple sum agrees with the coproduct casimir") {
  StateSampler rng(37);
  const RealizationParams l = rng.lambda(6);
  for (int k = 0; k < 100; ++k) {
    const PhaseState s = rng.state(6);
    for (int m = 3; m <= 6; ++m) {
      const double a = left_integral(m, s, l);
      CHECK(std::abs(a - coproduct_casimir(m, s, l)) <= 1e-10 * std::max(1.0, std::abs(a)));
      const double b = right_integral(m, s, l);
      CHECK(std::abs(b - right_coproduct_casimir(m, s, l)) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
    CHECK(left_integral(6, s, l) == right_integral(6, s, l));
  }
}

TEST_CASE("integral sets") {
  StateSampler rng(41);
  const RealizationParams l = rng.lambda(5);
  const PhaseState s = rng.state(5);
  const IntegralSet left = left_integrals(s, l);
  REQUIRE(left.values.size() == 3);
  CHECK(left.values[0].m == 3);
  CHECK(left.values[0].last_site == 3);
  const IntegralSet right = right_integrals(s, l);
  CHECK(right.values[0].first_site == 3);
  CHECK(right.values[0].last_site == 5);
  CHECK(right.values[2].value == left.values[2].value);
}

TEST_CASE("subalgebra closed forms") {
  CHECK(subalgebra_integral(Subalgebra::gl2, kS3, kOnes3) == doctest::Approx(1));
  CHECK(subalgebra_integral(Subalgebra::Gm, kS3, kOnes3) == doctest::Approx(2));
  CHECK(subalgebra_integral(Subalgebra::Gp, kS3, kOnes3) == doctest::Approx(2));
  CHECK(subalgebra_integral(Subalgebra::h4, kS3, kOnes3) == doctest::Approx(-1));
  const RealizationParams one(Eigen::VectorXd::Constant(1, 1.7));
  CHECK(subalgebra_integral(Subalgebra::Dp, PhaseState({0.4}, {-0.9}), one) == doctest::Approx(1.7 * 1.7));
  CHECK(subalgebra_integral(Subalgebra::Dm, kS3, kOnes3) == doctest::Approx(1));
  CHECK_THROWS_AS(subalgebra_integral(Subalgebra::Dm, PhaseState({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), kOnes3),
                  SingularityError);
  CHECK_THROWS_AS(subalgebra_integral(Subalgebra::E, kS3, kOnes3), ConfigError);
}

TEST_CASE("closed forms equal the generator-space casimirs of the realization") {
  StateSampler rng(43);
  const EParams e{0.7, -1.3};
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 5;
    const PhaseState s = rng.state(n);
    const RealizationParams l = rng.lambda(n);
    const H6Point g = realize(s, l);
    for (Subalgebra sub : kSubalgebras) {
      const double closed = subalgebra_integral(sub, s, l, e);
      const double via = at(subalgebra(sub, e).casimir, g);
      CHECK(std::abs(closed - via) <= 1e-10 * (1 + std::abs(via)));
    }
  }
}

TEST_CASE("casimir identity") {
  CHECK(casimir_identity_residual(PhaseState({1.0, 0.0}, {0.0, 1.0}), RealizationParams(Eigen::Vector2d(1, 1))) ==
        doctest::Approx(0));
  const double gp = subalgebra_integral(Subalgebra::Gp, kS3, kOnes3);
  const double gm = subalgebra_integral(Subalgebra::Gm, kS3, kOnes3);
  const double h4 = subalgebra_integral(Subalgebra::h4, kS3, kOnes3);
  CHECK(gp * gm - h4 * h4 == doctest::Approx(3));
  CHECK(realize(kS3, kOnes3).M() * coproduct_casimir(3, kS3, kOnes3) == doctest::Approx(3));
  CHECK(casimir_identity_residual(kS3, kOnes3) == doctest::Approx(0));
  StateSampler rng(47);
  for (int n = 1; n <= 5; ++n) CHECK(check_casimir_identity(n, rng.lambda(n), 200, 1e-10, 50 + n).pass);
}

TEST_CASE("homogeneity: quadratic in q and in p separately") {
  StateSampler rng(53);
  const RealizationParams l = rng.lambda(5);
  for (int k = 0; k < 20; ++k) {
    const PhaseState s = rng.state(5);
    const double t = rng.uniform(0.5, 2.0);
    for (int m = 3; m <= 5; ++m) {
      const double c = left_integral(m, s, l);
      CHECK(left_integral(m, PhaseState(t * s.q, s.p), l) == doctest::Approx(t * t * c));
      CHECK(left_integral(m, PhaseState(s.q, t * s.p), l) == doctest::Approx(t * t * c));
      // Rescaling all lambdas rescales every term.
      const RealizationParams lt(t * l.lambda());
      CHECK(left_integral(m, s, lt) == doctest::Approx(t * t * c));
    }
  }
}

TEST_CASE("each family is in involution") {
  StateSampler rng(59);
  const RealizationParams l = rng.lambda(5);
  CheckOptions absolute;
  absolute.absolute = true;
  CHECK(check_involution("left", left_integral_observables(l), 100, 1e-9, 1, absolute).pass);
  CHECK(check_involution("right", right_integral_observables(l), 100, 1e-9, 2, absolute).pass);
}

TEST_CASE("a sign flip in the triple sum breaks involution") {
  StateSampler rng(61);
  const RealizationParams l = rng.lambda(5);
  const Eigen::VectorXd lv = l.lambda();
  auto flipped = [lv](int m) {
    return make_observable("flipped[" + std::to_string(m) + "]", 5, [lv, m](const auto& q, const auto& p) {
      using S = typename std::decay_t<decltype(q)>::Scalar;
      S total(0);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int k = j + 1; k < m; ++k) {
            const S t = S(lv[i]) * angular_momentum_t(q, p, j, k) - S(lv[j]) * angular_momentum_t(q, p, k, i) +
                        S(lv[k]) * angular_momentum_t(q, p, i, j);
            total += t * t;
          }
      return total;
    });
  };
  const CheckRecord r = check_involution("mutant", {flipped(3), flipped(4), flipped(5)}, 50, 1e-9, 3);
  CHECK_FALSE(r.pass);
  const Observable h = compose(parse("K*Bp + Am^2", extended_context()), l);
  CHECK_FALSE(check_commuting("mutant universality", h, {flipped(4)}, 50, 1e-9, 4).pass);
}

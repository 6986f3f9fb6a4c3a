#include <doctest.h>

#include <cmath>

#include "h6/families.hpp"
#include "h6/integrals.hpp"
#include "h6/verify.hpp"

using namespace h6;

namespace {

Expr ex(const std::string& text, const ConstantTable& k = {}) { return parse(text, extended_context(), k); }

std::string admissibility_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const AdmissibilityError& e) {
    return e.what();
  }
  return "";
}

void check_integrable(const BuiltSystem& sys, std::uint64_t seed) {
  REQUIRE(sys.extra_integral.has_value());
  const CheckRecord r = check_commuting("extra", sys.hamiltonian, {*sys.extra_integral}, 100, 1e-9, seed);
  CAPTURE(r.worst);
  CAPTURE(r.max_residual);
  CHECK(r.pass);
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (const char* name : {"generic", "natural", "em", "geodesic", "subalgebra", "generator", "hk_geodesic",
                           "aplus_natural", "aplus_em", "aplus_geodesic", "aminus_geodesic", "bminus_geodesic",
                           "bplus_geodesic", "force_example"})
    CHECK(family_name(*family_from_name(name)) == name);
  CHECK_FALSE(family_from_name("kepler"));
}

TEST_CASE("generic family") {
  const RealizationParams l(Eigen::Vector3d(1.0, 0.5, 2.0));
  const PhaseState s({0.2, -1.0, 0.7}, {1.0, 0.3, -0.4});
  const BuiltSystem free = build_generic(ex("0.5*Bp"), l);
  CHECK(free.hamiltonian.value(s) == doctest::Approx(0.5 * s.p.squaredNorm()));
  CHECK_FALSE(free.extra_integral);
  CHECK(admissibility_message([&] { build_generic(ex("C_gl2"), l); }) ==
        "symbol C_gl2 not admissible in family generic (slot H)");
  // H = C_h6 is a function of C^(N): the rank census sees the dependence.
  const BuiltSystem cas = build_generic(casimir_Ch6(), l);
  const std::vector<Observable> set{left_integral_observable(3, l), cas.hamiltonian};
  CHECK(independence_rank("dep", set, 20, 5).rank == 1);
}

TEST_CASE("natural family") {
  const RealizationParams l(Eigen::Vector3d(1.0, 0.5, 2.0));
  const PhaseState s({0.2, -1.0, 0.7}, {1.0, 0.3, -0.4});
  const BuiltSystem osc = build_natural(ex("Bm"), l);
  CHECK(osc.hamiltonian.value(s) == doctest::Approx(0.5 * s.p.squaredNorm() + s.q.squaredNorm()));
  REQUIRE(osc.extra_integral);
  CHECK(osc.extra_integral->value(s) == doctest::Approx(subalgebra_integral(Subalgebra::gl2, s, l)));
  check_integrable(osc, 1);

  const BuiltSystem am = build_natural(ex("Am^2"), l);
  CHECK_FALSE(am.extra_integral);
  CHECK(am.hamiltonian.value(s) == doctest::Approx(0.5 * s.p.squaredNorm() + std::pow(l.lambda().dot(s.q), 2)));

  CHECK(admissibility_message([&] { build_natural(ex("Bp"), l); }).find("symbol Bp not admissible in family natural") ==
        0);
  CHECK_THROWS_AS(build_natural(ex("K*Bm"), l), AdmissibilityError);
}

TEST_CASE("em family and its potentials") {
  const RealizationParams l(Eigen::Vector3d(1.2, 0.7, 1.5));
  const PhaseState s({0.2, -1.0, 0.7}, {1.0, 0.3, -0.4});
  const double c = 0.8;
  const BuiltSystem sys = build_em(Expr::constant(c), Expr::constant(0), Expr::constant(0), l);
  CHECK(sys.hamiltonian.value(s) == doctest::Approx(0.5 * s.p.squaredNorm() + c * (s.q.dot(s.p) - l.M() / 2)));
  const EMPotentials pot = em_potentials(Expr::constant(c), Expr::constant(0), Expr::constant(0), s, l, 2.0);
  for (int i = 0; i < 3; ++i) CHECK(pot.A[i] == doctest::Approx(-c * s.q[i] / 2.0));
  CHECK(pot.psi == doctest::Approx(-c / 4.0 * l.M() - c * c / 4.0 * s.q.squaredNorm()));

  const EMPotentials zero = em_potentials(Expr::constant(0), Expr::constant(0), ex("Am*Bm"), s, l, -1.5);
  CHECK(zero.A.isZero());
  CHECK(zero.psi == doctest::Approx(l.lambda().dot(s.q) * s.q.squaredNorm() / -1.5));

  const Expr r = ex("Bm^2 - Am");
  CHECK(build_em(Expr::constant(0), Expr::constant(0), r, l).hamiltonian.value(s) ==
        doctest::Approx(build_natural(r, l).hamiltonian.value(s)));

  StateSampler rng(97);
  for (int k = 0; k < 10; ++k) {
    const std::vector<std::string> args{"Am", "Bm"};
    const Expr f = random_expr(rng, args, 3), g = random_expr(rng, args, 3), rr = random_expr(rng, args, 3);
    const BuiltSystem em = build_em(f, g, rr, l);
    const double e = rng.uniform(0.5, 2.0) * (k % 2 ? 1 : -1);
    for (const PhaseState& x : sample_states(3, 20, 100 + k)) {
      const double h = em.hamiltonian.value(x);
      CHECK(std::abs(em_hamiltonian(em_potentials(f, g, rr, x, l, e), x) - h) <= 1e-10 * (1 + std::abs(h)));
    }
  }
  CHECK_THROWS_AS(em_potentials(Expr::constant(1), Expr::constant(0), Expr::constant(0), s, l, 0.0), ConfigError);
  CHECK_THROWS_AS(em_potentials(Expr::constant(1), Expr::constant(0), Expr::constant(0), PhaseState({1.0}, {1.0}),
                                RealizationParams(Eigen::VectorXd::Ones(1)), 1.0),
                  Error);
}

TEST_CASE("geodesic family") {
  const RealizationParams l(Eigen::Vector4d(1.0, 0.5, 2.0, 0.8));
  const PhaseState s({0.2, -1.0, 0.7, 0.1}, {1.0, 0.3, -0.4, 0.9});
  const Expr zero = Expr::constant(0);
  CHECK(build_geodesic(Expr::constant(1), zero, zero, zero, std::nullopt, l).hamiltonian.value(s) ==
        doctest::Approx(s.p.squaredNorm()));
  CHECK(build_geodesic(zero, Expr::constant(1), zero, zero, std::nullopt, l).hamiltonian.value(s) ==
        doctest::Approx(std::pow(l.lambda().dot(s.p), 2)));
  const BuiltSystem g = build_geodesic(ex("1 + Bm"), ex("Am"), ex("Bm^2"), ex("Am*Bm - 1"), std::nullopt, l);
  for (double t : {2.0, -0.5, 3.0})
    CHECK(g.hamiltonian.value(PhaseState(s.q, t * s.p)) == doctest::Approx(t * t * g.hamiltonian.value(s)));
  const BuiltSystem gu = build_geodesic(ex("1 + Bm"), zero, zero, zero, ex("Am^2"), l);
  CHECK(gu.hamiltonian.value(s) == doctest::Approx((1 + s.q.squaredNorm()) * s.p.squaredNorm() +
                                                   std::pow(l.lambda().dot(s.q), 2)));
  CHECK_THROWS_AS(build_geodesic(ex("Ap"), zero, zero, zero, std::nullopt, l), AdmissibilityError);
}

TEST_CASE("subalgebra family") {
  const RealizationParams l(Eigen::Vector4d(1.0, 0.5, 2.0, 0.8));
  const PhaseState s({0.2, -1.0, 0.7, 0.1}, {1.0, 0.3, -0.4, 0.9});
  const BuiltSystem gl2 = build_subalgebra(Subalgebra::gl2, ex("0.5*Bp + Bm"), l);
  check_integrable(gl2, 2);
  const BuiltSystem h4 = build_subalgebra(Subalgebra::h4, ex("K"), l);
  CHECK(h4.hamiltonian.value(s) == doctest::Approx(s.q.dot(s.p) - l.M() / 2));
  CHECK(h4.extra_integral->value(s) == doctest::Approx(subalgebra_integral(Subalgebra::h4, s, l)));
  const BuiltSystem dm = build_subalgebra(Subalgebra::Dm, ex("Am^2/Bm"), l);
  CHECK(independence_rank("dm", {dm.hamiltonian, *dm.extra_integral}, 20, 3).rank == 1);
  CHECK_THROWS_AS(build_subalgebra(Subalgebra::h4, ex("Bp"), l), AdmissibilityError);
  CHECK_THROWS_AS(build_subalgebra(Subalgebra::Gp, ex("K"), l), AdmissibilityError);
  CHECK_THROWS_AS(build_subalgebra(Subalgebra::E, ex("BE"), l), ConfigError);
  const BuiltSystem e = build_subalgebra(Subalgebra::E, ex("BE^2 + Am*Ap + C_E"), l, EParams{0.6, -1.1});
  check_integrable(e, 3);
  CHECK(subalgebra_admissible_symbols(Subalgebra::Dp) == std::set<std::string>{"K", "Ap", "Bp", "M", "C_Dp"});
}

TEST_CASE("generator family and presets") {
  const RealizationParams l(Eigen::Vector4d(1.0, 0.5, 2.0, 0.8));
  const PhaseState s({0.2, -1.0, 0.7, 0.1}, {1.0, 0.3, -0.4, 0.9});
  const BuiltSystem ap = build_generator_family(Generator::Ap, ex("0.5*Bp + C_Gm"), l);
  double gm = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) gm += std::pow(l[j] * s.q[i] - l[i] * s.q[j], 2);
  CHECK(ap.hamiltonian.value(s) == doctest::Approx(0.5 * s.p.squaredNorm() + gm));
  CHECK(ap.extra_integral->value(s) == doctest::Approx(l.lambda().dot(s.p)));
  check_integrable(ap, 4);
  const BuiltSystem k = build_generator_family(Generator::K, ex("C_gl2 + K^2"), l);
  CHECK(k.extra_integral->value(s) == doctest::Approx(s.q.dot(s.p) - l.M() / 2));
  check_integrable(k, 5);
  CHECK_THROWS_AS(build_generator_family(Generator::M, ex("K"), l), ConfigError);
  CHECK_THROWS_AS(build_generator_family(Generator::K, ex("Ap"), l), AdmissibilityError);
  CHECK_THROWS_AS(build_generator_family(Generator::Bp, ex("Bm"), l), AdmissibilityError);

  const Expr f = ex("1 + C_Dm"), g = ex("C_Dm^2"), r = ex("0.3"), t = ex("C_Dm - 2");
  check_integrable(build_hk_geodesic(f, g, r, t, l), 6);
  check_integrable(build_aplus_natural(ex("C_Gm^2"), l), 7);
  check_integrable(build_aplus_em(ex("C_Gm"), ex("0.5"), ex("C_Gm^2 - 1"), l), 8);
  check_integrable(build_aplus_geodesic(ex("1"), ex("C_Gm"), ex("2"), ex("0.1*C_Gm"), ex("-1"), l), 9);
  check_integrable(build_aminus_geodesic(ex("1 + Am*Bm"), ex("C_Dm + C_Gm"), l), 10);
  check_integrable(build_bminus_geodesic(ex("Bm + Am^2 + C_Gm"), l), 11);
  check_integrable(build_bplus_geodesic(1.0, -0.5, 0.25, 2.0, l), 12);
  CHECK(build_hk_geodesic(f, g, r, t, l).family == Family::hk_geodesic);
  CHECK_THROWS_AS(build_hk_geodesic(ex("C_Gm"), g, r, t, l), AdmissibilityError);
  CHECK_THROWS_AS(build_aplus_natural(ex("Bm"), l), AdmissibilityError);
}

TEST_CASE("force example") {
  StateSampler rng(101);
  for (int n : {3, 4}) {
    const RealizationParams l = rng.lambda(n);
    for (int k = 0; k < 5; ++k) {
      const double a1 = rng.uniform(0.5, 2) * (k % 2 ? -1 : 1), a2 = rng.uniform(-2, 2), a3 = rng.uniform(0.5, 2);
      check_integrable(build_force_example(a1, a2, a3, l), 200 + k);
    }
    const BuiltSystem lim = build_force_example(1.5, 0.0, 0.7, l);
    for (const PhaseState& s : sample_states(n, 20, 7)) {
      const double cgp = subalgebra_integral(Subalgebra::Gp, s, l);
      CHECK(std::abs(lim.extra_integral->value(s) + 2.25 * cgp) <= 1e-12 * (1 + 2.25 * cgp));
    }
  }
  const RealizationParams l4 = rng.lambda(4);
  const BuiltSystem sys = build_force_example(1.0, 1.0, 1.0, l4);
  std::vector<Observable> census = coproduct_integrals(l4);
  census.push_back(*sys.extra_integral);
  census.push_back(sys.hamiltonian);
  CHECK(independence_rank("census", census, 20, 9).rank == 5);
  CHECK_THROWS_AS(build_force_example(0.0, 1.0, 1.0, l4), ConfigError);
  CHECK_THROWS_AS(build_force_example(1.0, 1.0, 0.0, l4), ConfigError);
}

TEST_CASE("build dispatches on the family") {
  const RealizationParams l(Eigen::Vector3d(1.0, 0.5, 2.0));
  HamiltonianSpec spec;
  spec.family = Family::natural;
  spec.slots.emplace("F", ex("Bm^2"));
  CHECK(build(spec, l).extra_integral);
  spec.slots.emplace("T", ex("Bm"));
  CHECK_THROWS_AS(build(spec, l), ConfigError);

  HamiltonianSpec gen;
  gen.family = Family::generic;
  CHECK_THROWS_AS(build(gen, l), ConfigError);

  HamiltonianSpec sub;
  sub.family = Family::subalgebra;
  sub.slots.emplace("H", ex("K"));
  CHECK_THROWS_AS(build(sub, l), ConfigError);
  sub.subalgebra = Subalgebra::h4;
  CHECK(build(sub, l).extra_integral);

  HamiltonianSpec force;
  force.family = Family::force_example;
  force.parameters = {{"alpha1", 1.0}, {"alpha2", 0.5}};
  CHECK_THROWS_AS(build(force, l), ConfigError);
  force.parameters["alpha3"] = 2.0;
  CHECK(build(force, l).family == Family::force_example);

  HamiltonianSpec geo;
  geo.family = Family::geodesic;
  geo.slots.emplace("F", ex("1"));
  const PhaseState s({0.2, -1.0, 0.7}, {1.0, 0.3, -0.4});
  CHECK(build(geo, l).hamiltonian.value(s) == doctest::Approx(s.p.squaredNorm()));
}

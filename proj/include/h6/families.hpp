#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "h6/algebra.hpp"
#include "h6/expr.hpp"
#include "h6/poisson.hpp"
#include "h6/realization.hpp"

namespace h6 {

enum class Family {
  generic,
  natural,
  em,
  geodesic,
  subalgebra,
  generator,
  hk_geodesic,
  aplus_natural,
  aplus_em,
  aplus_geodesic,
  aminus_geodesic,
  bminus_geodesic,
  bplus_geodesic,
  force_example,
};

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

/// Everything needed to build one Hamiltonian. Slot expressions are over
/// `extended_context()`; the builder enforces the family's admissible set.
struct HamiltonianSpec {
  Family family = Family::generic;
  std::map<std::string, Expr, std::less<>> slots;  // "H", "F", "G", "R", "S", "T", "U"
  std::optional<Subalgebra> subalgebra;
  std::optional<Generator> generator;
  std::map<std::string, double, std::less<>> parameters;  // alpha1.., alpha, beta, ...
};

struct BuiltSystem {
  Family family;
  Observable hamiltonian;
  /// Generator-space form of H over `extended_context()`.
  Expr hamiltonian_expr;
  /// Extra integral guaranteed by the construction, if any.
  std::optional<Observable> extra_integral;
  std::optional<Expr> extra_integral_expr;
  std::string provenance;
};

/// Symbols a slot of `family` may use.
const std::set<std::string>& admissible_symbols(Family family, std::string_view slot = {});
const std::set<std::string>& generator_admissible_symbols(Generator x);
std::set<std::string> subalgebra_admissible_symbols(Subalgebra sub);

/// Throws `AdmissibilityError` naming the first offending symbol.
void require_admissible(const Expr& e, const std::set<std::string>& allowed,
                        std::string_view family, std::string_view slot = {});

BuiltSystem build_generic(const Expr& h, const RealizationParams& lambda);
/// H = Bp/2 + F(Am, Bm). F free of Am yields the gl(2) integral.
BuiltSystem build_natural(const Expr& f, const RealizationParams& lambda);
/// H = Bp/2 + K F + Ap G + R, all slots over {Am, Bm}.
BuiltSystem build_em(const Expr& f, const Expr& g, const Expr& r, const RealizationParams& lambda);
/// H = Bp F + Ap^2 G + (K + M/2)^2 R + (K + M/2) Ap S (+ U).
BuiltSystem build_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                           const std::optional<Expr>& u, const RealizationParams& lambda);
/// H defined on a subalgebra; the extra integral is its N-site Casimir.
BuiltSystem build_subalgebra(Subalgebra sub, const Expr& h, const RealizationParams& lambda,
                             const std::optional<EParams>& e = std::nullopt);
/// H commuting with generator `x`; the extra integral is `x` itself.
BuiltSystem build_generator_family(Generator x, const Expr& h, const RealizationParams& lambda,
                                   const std::optional<EParams>& e = std::nullopt);

// presets of build_generator_family
BuiltSystem build_hk_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                              const RealizationParams& lambda);
BuiltSystem build_aplus_natural(const Expr& f, const RealizationParams& lambda);
BuiltSystem build_aplus_em(const Expr& f, const Expr& g, const Expr& r,
                           const RealizationParams& lambda);
BuiltSystem build_aplus_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                                 const Expr& t, const RealizationParams& lambda);
BuiltSystem build_aminus_geodesic(const Expr& f, const Expr& g, const RealizationParams& lambda);
BuiltSystem build_bminus_geodesic(const Expr& f, const RealizationParams& lambda);
BuiltSystem build_bplus_geodesic(double alpha, double beta, double gamma, double delta,
                                 const RealizationParams& lambda);

/// H = Bp (a1 Am + a2 Bm + a3) with its quadratic extra integral. a2 = 0 is
/// allowed (the Galilean-subalgebra limit); a1 and a3 must be non-zero.
BuiltSystem build_force_example(double a1, double a2, double a3, const RealizationParams& lambda);

/// Dispatches on `spec.family`; missing optional slots default to 0.
BuiltSystem build(const HamiltonianSpec& spec, const RealizationParams& lambda,
                  const std::optional<EParams>& e = std::nullopt);

/// Vector and scalar potentials of the 3D electromagnetic form of `build_em`.
struct EMPotentials {
  Eigen::Vector3d A = Eigen::Vector3d::Zero();
  double psi = 0.0;
  double charge = 1.0;
};

EMPotentials em_potentials(const Expr& f, const Expr& g, const Expr& r, const PhaseState& s,
                           const RealizationParams& lambda, double charge);
/// (p - eA)^2 / 2 + e psi.
double em_hamiltonian(const EMPotentials& pot, const PhaseState& s);

}  // namespace h6

#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "h6/expr.hpp"

namespace h6 {

/// The six generators of the two-photon Lie-Poisson algebra. `M` is central.
enum class Generator : int { K = 0, Ap, Am, Bp, Bm, M };

inline constexpr std::array<Generator, 6> kGenerators{Generator::K,  Generator::Ap, Generator::Am,
                                                      Generator::Bp, Generator::Bm, Generator::M};

std::string_view symbol_name(Generator g);
std::optional<Generator> generator_from_name(std::string_view name);

/// Coordinates on the six-dimensional Lie-Poisson manifold, ordered as
/// `kGenerators`.
template <typename Scalar>
struct BasicH6Point {
  Eigen::Matrix<Scalar, 6, 1> coords = Eigen::Matrix<Scalar, 6, 1>::Zero();

  BasicH6Point() = default;
  explicit BasicH6Point(const Eigen::Matrix<Scalar, 6, 1>& c) : coords(c) {}
  BasicH6Point(Scalar k, Scalar ap, Scalar am, Scalar bp, Scalar bm, Scalar m) {
    coords << k, ap, am, bp, bm, m;
  }

  Scalar& operator[](Generator g) { return coords[static_cast<int>(g)]; }
  const Scalar& operator[](Generator g) const { return coords[static_cast<int>(g)]; }

  Scalar K() const { return coords[0]; }
  Scalar Ap() const { return coords[1]; }
  Scalar Am() const { return coords[2]; }
  Scalar Bp() const { return coords[3]; }
  Scalar Bm() const { return coords[4]; }
  Scalar M() const { return coords[5]; }
};

using H6Point = BasicH6Point<double>;

/// Symbols K Ap Am Bp Bm M, in generator order.
const SymbolContext& generator_context();

/// Generator symbols followed by the combined symbol `BE` (= mu*Bp + nu*Bm)
/// and the Casimir symbols C_Dp C_Dm C_h4 C_Gp C_Gm C_E C_gl2.
const SymbolContext& extended_context();

/// Table entry {x, y} as a linear expression in the generator symbols.
const Expr& abstract_bracket(Generator x, Generator y);

/// Lie-Poisson structure matrix at `g`: entry (x, y) = {x, y}(g).
Eigen::Matrix<double, 6, 6> structure_matrix(const H6Point& g);

/// Sum over X, Y of d(e1)/dX d(e2)/dY {X, Y}(g). Both expressions are over
/// `generator_context()`.
double lie_poisson_bracket(const Expr& e1, const Expr& e2, const H6Point& g);

/// Quartic Casimir C.
const Expr& casimir_C();
/// Cubic Casimir C_h6 = C / M.
const Expr& casimir_Ch6();

// --- subalgebras -------------------------------------------------------------

enum class Subalgebra { Dp, Dm, h4, Gp, Gm, E, gl2 };

inline constexpr std::array<Subalgebra, 7> kSubalgebras{
    Subalgebra::Dp, Subalgebra::Dm, Subalgebra::h4, Subalgebra::Gp,
    Subalgebra::Gm, Subalgebra::E,  Subalgebra::gl2};

/// Parameters of the centrally extended Euclidean/Poincare subalgebra.
struct EParams {
  double mu = 1.0;
  double nu = 1.0;
};

std::string_view subalgebra_name(Subalgebra s);
std::optional<Subalgebra> subalgebra_from_name(std::string_view name);
/// "C_" + name, the DSL symbol for the subalgebra Casimir.
std::string casimir_symbol(Subalgebra s);

struct SubalgebraDef {
  Subalgebra id;
  std::string name;
  /// DSL symbols of the generators; E lists the combined symbol "BE".
  std::vector<std::string> generators;
  /// Each generator as a coefficient vector over the h6 basis.
  std::vector<Eigen::Matrix<double, 6, 1>> basis;
  /// Casimir over `generator_context()`.
  Expr casimir;
  std::optional<EParams> e_params;
  /// Generators appearing in a Casimir denominator.
  std::vector<Generator> denominators;
};

/// Registry lookup. `E` requires `e_params` with mu and nu non-zero.
SubalgebraDef subalgebra(Subalgebra id, std::optional<EParams> e_params = std::nullopt);
SubalgebraDef subalgebra(std::string_view name, std::optional<EParams> e_params = std::nullopt);

/// True when every bracket of two basis elements lies in their span.
bool is_closed(const SubalgebraDef& def);

// --- extended symbols ----------------------------------------------------------

/// Evaluates a chosen subset of the extended-context symbols at a generator
/// point, with gradients with respect to the six generators. Symbols outside
/// the subset read as 0 so unused rational Casimirs never hit their poles.
class ExtendedSymbols {
 public:
  /// Throws `ConfigError` when `used` needs E parameters that are absent and
  /// `UnknownSymbolError` for names outside `extended_context()`.
  ExtendedSymbols(const std::set<std::string>& used, std::optional<EParams> e_params);

  const std::optional<EParams>& e_params() const { return e_params_; }

  /// values: one per extended symbol; jacobian: one row per extended symbol.
  void evaluate(const H6Point& g, Eigen::VectorXd& values,
                Eigen::Matrix<double, Eigen::Dynamic, 6>& jacobian) const;
  Eigen::VectorXd values(const H6Point& g) const;

  /// Generators that appear in a denominator of some used symbol.
  const std::vector<Generator>& denominators() const { return denominators_; }

 private:
  std::optional<EParams> e_params_;
  std::vector<bool> used_;
  std::vector<std::optional<CompiledExpr>> casimirs_;  // extended-context order after BE
  std::vector<Generator> denominators_;
};

}  // namespace h6

#include "h6/algebra.hpp"

#include <algorithm>
#include <map>

namespace h6 {

namespace {

constexpr std::array<std::string_view, 6> kGeneratorNames{"K", "Ap", "Am", "Bp", "Bm", "M"};
constexpr std::array<std::string_view, 7> kSubalgebraNames{"Dp", "Dm", "h4", "Gp", "Gm", "E", "gl2"};

constexpr std::size_t kFirstCasimir = 7;  // K Ap Am Bp Bm M BE, then C_*

int idx(Generator g) { return static_cast<int>(g); }

struct BracketTable {
  std::array<std::array<Expr, 6>, 6> entries;

  BracketTable() {
    const SymbolContext& ctx = generator_context();
    auto set = [&](Generator x, Generator y, std::string_view text) {
      const Expr e = parse(text, ctx);
      entries[idx(x)][idx(y)] = e;
      entries[idx(y)][idx(x)] = text == "0" ? e : -e;
    };
    using G = Generator;
    for (G x : kGenerators)
      for (G y : kGenerators) entries[idx(x)][idx(y)] = Expr::constant(0);
    set(G::K, G::Ap, "Ap");
    set(G::K, G::Am, "-Am");
    set(G::Am, G::Ap, "M");
    set(G::K, G::Bp, "2*Bp");
    set(G::K, G::Bm, "-2*Bm");
    set(G::Bm, G::Bp, "4*K + 2*M");
    set(G::Ap, G::Bm, "-2*Am");
    set(G::Ap, G::Bp, "0");
    set(G::Am, G::Bp, "2*Ap");
    set(G::Am, G::Bm, "0");
  }
};

const BracketTable& table() {
  static const BracketTable t;
  return t;
}

/// Each table entry is linear: {X, Y} = sum_Z c[X][Y][Z] Z.
const std::array<Eigen::Matrix<double, 6, 6>, 6>& structure_constants() {
  static const auto c = [] {
    std::array<Eigen::Matrix<double, 6, 6>, 6> out;  // out[Z](X, Y)
    const Eigen::Matrix<double, 6, 1> origin = Eigen::Matrix<double, 6, 1>::Zero();
    for (Generator x : kGenerators)
      for (Generator y : kGenerators) {
        const ValueGradient vg =
            eval_with_gradient(table().entries[idx(x)][idx(y)], generator_context(),
                               std::span<const double>(origin.data(), 6));
        for (int z = 0; z < 6; ++z) out[z](idx(x), idx(y)) = vg.gradient[z];
      }
    return out;
  }();
  return c;
}

Expr parse_generators(std::string_view text, const ConstantTable& constants = {}) {
  return parse(text, generator_context(), constants);
}

Eigen::Matrix<double, 6, 1> unit(Generator g) {
  Eigen::Matrix<double, 6, 1> v = Eigen::Matrix<double, 6, 1>::Zero();
  v[idx(g)] = 1.0;
  return v;
}

}  // namespace

std::string_view symbol_name(Generator g) { return kGeneratorNames[static_cast<std::size_t>(g)]; }

std::optional<Generator> generator_from_name(std::string_view name) {
  for (Generator g : kGenerators)
    if (symbol_name(g) == name) return g;
  return std::nullopt;
}

const SymbolContext& generator_context() {
  static const SymbolContext ctx({"K", "Ap", "Am", "Bp", "Bm", "M"});
  return ctx;
}

const SymbolContext& extended_context() {
  static const SymbolContext ctx({"K", "Ap", "Am", "Bp", "Bm", "M", "BE", "C_Dp", "C_Dm", "C_h4",
                                  "C_Gp", "C_Gm", "C_E", "C_gl2"});
  return ctx;
}

const Expr& abstract_bracket(Generator x, Generator y) { return table().entries[idx(x)][idx(y)]; }

Eigen::Matrix<double, 6, 6> structure_matrix(const H6Point& g) {
  Eigen::Matrix<double, 6, 6> pi = Eigen::Matrix<double, 6, 6>::Zero();
  const auto& c = structure_constants();
  for (int z = 0; z < 6; ++z) pi += g.coords[z] * c[z];
  return pi;
}

double lie_poisson_bracket(const Expr& e1, const Expr& e2, const H6Point& g) {
  const std::span<const double> b(g.coords.data(), 6);
  const ValueGradient a = eval_with_gradient(e1, generator_context(), b);
  const ValueGradient c = eval_with_gradient(e2, generator_context(), b);
  return a.gradient.dot(structure_matrix(g) * c.gradient);
}

const Expr& casimir_C() {
  static const Expr e =
      parse_generators("(M*Bp - Ap^2)*(M*Bm - Am^2) - (M*K - Am*Ap + M^2/2)^2");
  return e;
}

const Expr& casimir_Ch6() {
  static const Expr e = parse_generators(
      "M*Bp*Bm - Bp*Am^2 - Bm*Ap^2 - M*(K + M/2)^2 + 2*Am*Ap*(K + M/2)");
  return e;
}

// --- subalgebras -------------------------------------------------------------

std::string_view subalgebra_name(Subalgebra s) {
  return kSubalgebraNames[static_cast<std::size_t>(s)];
}

std::optional<Subalgebra> subalgebra_from_name(std::string_view name) {
  for (Subalgebra s : kSubalgebras)
    if (subalgebra_name(s) == name) return s;
  return std::nullopt;
}

std::string casimir_symbol(Subalgebra s) { return "C_" + std::string(subalgebra_name(s)); }

SubalgebraDef subalgebra(Subalgebra id, std::optional<EParams> e_params) {
  using G = Generator;
  SubalgebraDef def{id, std::string(subalgebra_name(id)), {}, {}, {}, std::nullopt, {}};
  auto gens = [&](std::initializer_list<G> list) {
    for (G g : list) {
      def.generators.emplace_back(symbol_name(g));
      def.basis.push_back(unit(g));
    }
  };
  switch (id) {
    case Subalgebra::Dp:
      gens({G::K, G::Ap, G::Bp});
      def.casimir = parse_generators("Ap^2/Bp");
      def.denominators = {G::Bp};
      break;
    case Subalgebra::Dm:
      gens({G::K, G::Am, G::Bm});
      def.casimir = parse_generators("Am^2/Bm");
      def.denominators = {G::Bm};
      break;
    case Subalgebra::h4:
      gens({G::K, G::Am, G::Ap, G::M});
      def.casimir = parse_generators("M*(K + M/2) - Am*Ap");
      break;
    case Subalgebra::Gp:
      gens({G::Bp, G::Am, G::Ap, G::M});
      def.casimir = parse_generators("M*Bp - Ap^2");
      break;
    case Subalgebra::Gm:
      gens({G::Bm, G::Am, G::Ap, G::M});
      def.casimir = parse_generators("M*Bm - Am^2");
      break;
    case Subalgebra::E: {
      if (!e_params) throw ConfigError("subalgebra E requires parameters mu and nu");
      if (e_params->mu == 0.0 || e_params->nu == 0.0)
        throw ConfigError("subalgebra E requires mu and nu non-zero");
      def.e_params = e_params;
      def.generators.emplace_back("BE");
      def.basis.push_back(e_params->mu * unit(G::Bp) + e_params->nu * unit(G::Bm));
      gens({G::Am, G::Ap, G::M});
      const ConstantTable k{{"mu", e_params->mu}, {"nu", e_params->nu}};
      def.casimir = parse_generators("M*(mu*Bp + nu*Bm) - mu*Ap^2 - nu*Am^2", k);
      break;
    }
    case Subalgebra::gl2:
      gens({G::K, G::Bm, G::Bp, G::M});
      def.casimir = parse_generators("Bm*Bp - (K + M/2)^2");
      break;
  }
  return def;
}

SubalgebraDef subalgebra(std::string_view name, std::optional<EParams> e_params) {
  const auto id = subalgebra_from_name(name);
  if (!id) throw ConfigError("unknown subalgebra '" + std::string(name) + "'");
  return subalgebra(*id, e_params);
}

bool is_closed(const SubalgebraDef& def) {
  const auto k = static_cast<Eigen::Index>(def.basis.size());
  Eigen::Matrix<double, 6, Eigen::Dynamic> span(6, k);
  for (Eigen::Index i = 0; i < k; ++i) span.col(i) = def.basis[static_cast<std::size_t>(i)];
  const auto& c = structure_constants();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
  for (const auto& u : def.basis)
    for (const auto& v : def.basis) {
      Eigen::Matrix<double, 6, 1> w;
      for (int z = 0; z < 6; ++z) w[z] = u.dot(c[z] * v);
      const Eigen::VectorXd coeffs = qr.solve(w);
      if ((span * coeffs - w).norm() > 1e-12 * (1.0 + w.norm())) return false;
    }
  return true;
}

// --- extended symbols ----------------------------------------------------------

ExtendedSymbols::ExtendedSymbols(const std::set<std::string>& used, std::optional<EParams> e_params)
    : e_params_(e_params), used_(extended_context().size(), false),
      casimirs_(extended_context().size() - kFirstCasimir) {
  const SymbolContext& ctx = extended_context();
  for (const std::string& s : used) {
    const auto i = ctx.index_of(s);
    if (!i) throw UnknownSymbolError(s);
    used_[*i] = true;
  }
  if ((used.count("BE") || used.count("C_E")) && !e_params_)
    throw ConfigError("symbol BE/C_E requires realization parameters mu and nu");
  for (Subalgebra sub : kSubalgebras) {
    const std::size_t i = *ctx.index_of(casimir_symbol(sub));
    if (!used_[i]) continue;
    const SubalgebraDef def = subalgebra(sub, e_params_);
    casimirs_[i - kFirstCasimir].emplace(def.casimir, generator_context());
    for (Generator g : def.denominators)
      if (std::find(denominators_.begin(), denominators_.end(), g) == denominators_.end())
        denominators_.push_back(g);
  }
}

void ExtendedSymbols::evaluate(const H6Point& g, Eigen::VectorXd& values,
                               Eigen::Matrix<double, Eigen::Dynamic, 6>& jacobian) const {
  const auto n = static_cast<Eigen::Index>(extended_context().size());
  values = Eigen::VectorXd::Zero(n);
  jacobian = Eigen::Matrix<double, Eigen::Dynamic, 6>::Zero(n, 6);
  for (int i = 0; i < 6; ++i) {
    values[i] = g.coords[i];
    jacobian(i, i) = 1.0;
  }
  if (used_[6]) {
    values[6] = e_params_->mu * g.Bp() + e_params_->nu * g.Bm();
    jacobian(6, idx(Generator::Bp)) = e_params_->mu;
    jacobian(6, idx(Generator::Bm)) = e_params_->nu;
  }
  const std::span<const double> b(g.coords.data(), 6);
  for (std::size_t k = 0; k < casimirs_.size(); ++k) {
    if (!casimirs_[k]) continue;
    const ValueGradient vg = casimirs_[k]->value_gradient(b);
    const auto row = static_cast<Eigen::Index>(kFirstCasimir + k);
    values[row] = vg.value;
    jacobian.row(row) = vg.gradient.transpose();
  }
}

Eigen::VectorXd ExtendedSymbols::values(const H6Point& g) const {
  Eigen::VectorXd v;
  Eigen::Matrix<double, Eigen::Dynamic, 6> j;
  evaluate(g, v, j);
  return v;
}

}  // namespace h6

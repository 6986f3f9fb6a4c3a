#include "h6/families.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "h6/integrals.hpp"

namespace h6 {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 14> kFamilyNames{{
    {Family::generic, "generic"},
    {Family::natural, "natural"},
    {Family::em, "em"},
    {Family::geodesic, "geodesic"},
    {Family::subalgebra, "subalgebra"},
    {Family::generator, "generator"},
    {Family::hk_geodesic, "hk_geodesic"},
    {Family::aplus_natural, "aplus_natural"},
    {Family::aplus_em, "aplus_em"},
    {Family::aplus_geodesic, "aplus_geodesic"},
    {Family::aminus_geodesic, "aminus_geodesic"},
    {Family::bminus_geodesic, "bminus_geodesic"},
    {Family::bplus_geodesic, "bplus_geodesic"},
    {Family::force_example, "force_example"},
}};

using SymbolSet = std::set<std::string>;

const SymbolSet kGenerators6{"K", "Ap", "Am", "Bp", "Bm", "M"};
const SymbolSet kAmBm{"Am", "Bm"};
const SymbolSet kCDm{"C_Dm"};
const SymbolSet kCGm{"C_Gm"};
const SymbolSet kMinusArgs{"C_Dm", "C_Gm", "Am", "Bm"};
const SymbolSet kNone{};

/// Templates are parsed over the extended symbols plus slot placeholders.
const SymbolContext& template_context() {
  static const SymbolContext ctx = [] {
    std::vector<std::string> names = extended_context().names();
    for (const char* slot : {"F", "G", "R", "S", "T", "U"}) names.emplace_back(slot);
    return SymbolContext(std::move(names));
  }();
  return ctx;
}

Expr instantiate(std::string_view text, std::map<std::string, Expr, std::less<>> slots,
                 const ConstantTable& constants = {}) {
  return substitute(parse(text, template_context(), constants), slots);
}

BuiltSystem assemble(Family family, const Expr& h, const RealizationParams& lambda,
                     const std::optional<EParams>& e, std::string provenance) {
  return BuiltSystem{family,      compose(h, lambda, e, "H"), h, std::nullopt, std::nullopt,
                     std::move(provenance)};
}

void require_nonzero(double v, const char* what) {
  if (v == 0.0) throw ConfigError(std::string(what) + " must be non-zero");
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& [fam, n] : kFamilyNames)
    if (n == name) return fam;
  return std::nullopt;
}

const SymbolSet& admissible_symbols(Family family, std::string_view slot) {
  switch (family) {
    case Family::generic:
      return kGenerators6;
    case Family::natural:
    case Family::em:
    case Family::geodesic:
      return kAmBm;
    case Family::hk_geodesic:
      return kCDm;
    case Family::aplus_natural:
    case Family::aplus_em:
    case Family::aplus_geodesic:
      return kCGm;
    case Family::aminus_geodesic:
    case Family::bminus_geodesic:
      return kMinusArgs;
    case Family::bplus_geodesic:
    case Family::force_example:
      return kNone;
    case Family::subalgebra:
    case Family::generator:
      break;
  }
  throw Error("admissible set of family '" + std::string(family_name(family)) + "' slot '" +
              std::string(slot) + "' depends on its subalgebra or generator");
}

const SymbolSet& generator_admissible_symbols(Generator x) {
  static const SymbolSet k{"C_Dp", "C_Dm", "C_h4", "C_gl2", "K", "M"};
  static const SymbolSet ap{"C_Dp", "C_h4", "C_Gp", "C_Gm", "C_E", "Ap", "Bp", "M"};
  static const SymbolSet am{"C_Dm", "C_h4", "C_Gp", "C_Gm", "C_E", "Am", "Bm", "M"};
  static const SymbolSet bm{"C_Dm", "C_Gm", "C_gl2", "Bm", "Am", "M"};
  static const SymbolSet bp{"C_Dp", "C_Gp", "C_gl2", "Bp", "Ap", "M"};
  switch (x) {
    case Generator::K: return k;
    case Generator::Ap: return ap;
    case Generator::Am: return am;
    case Generator::Bm: return bm;
    case Generator::Bp: return bp;
    case Generator::M: break;
  }
  throw ConfigError("the central generator M gives no generator-integrable family");
}

SymbolSet subalgebra_admissible_symbols(Subalgebra sub) {
  const SubalgebraDef def = subalgebra(sub, EParams{1.0, 1.0});
  SymbolSet out(def.generators.begin(), def.generators.end());
  out.insert("M");
  out.insert(casimir_symbol(sub));
  return out;
}

void require_admissible(const Expr& e, const SymbolSet& allowed, std::string_view family,
                        std::string_view slot) {
  for (const std::string& s : e.symbols()) {
    if (!extended_context().contains(s)) throw UnknownSymbolError(s);
    if (!allowed.count(s)) {
      std::string msg = "symbol " + s + " not admissible in family " + std::string(family);
      if (!slot.empty()) msg += " (slot " + std::string(slot) + ")";
      throw AdmissibilityError(msg);
    }
  }
}

BuiltSystem build_generic(const Expr& h, const RealizationParams& lambda) {
  require_admissible(h, kGenerators6, "generic", "H");
  return assemble(Family::generic, h, lambda, std::nullopt, "generic h6 function; quasi-integrable");
}

BuiltSystem build_natural(const Expr& f, const RealizationParams& lambda) {
  require_admissible(f, kAmBm, "natural", "F");
  BuiltSystem sys = assemble(Family::natural, instantiate("0.5*Bp + F", {{"F", f}}), lambda,
                             std::nullopt, "natural system on Euclidean space; quasi-integrable");
  if (!f.symbols().count("Am")) {
    sys.extra_integral = subalgebra_integral_observable(Subalgebra::gl2, lambda);
    sys.extra_integral_expr = Expr::symbol("C_gl2");
    sys.provenance = "central potential (gl(2) subalgebra); extra integral C_gl2";
  }
  return sys;
}

BuiltSystem build_em(const Expr& f, const Expr& g, const Expr& r, const RealizationParams& lambda) {
  require_admissible(f, kAmBm, "em", "F");
  require_admissible(g, kAmBm, "em", "G");
  require_admissible(r, kAmBm, "em", "R");
  return assemble(Family::em,
                  instantiate("0.5*Bp + K*F + Ap*G + R", {{"F", f}, {"G", g}, {"R", r}}), lambda,
                  std::nullopt, "static electromagnetic Hamiltonian; quasi-integrable");
}

BuiltSystem build_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                           const std::optional<Expr>& u, const RealizationParams& lambda) {
  require_admissible(f, kAmBm, "geodesic", "F");
  require_admissible(g, kAmBm, "geodesic", "G");
  require_admissible(r, kAmBm, "geodesic", "R");
  require_admissible(s, kAmBm, "geodesic", "S");
  std::map<std::string, Expr, std::less<>> slots{{"F", f}, {"G", g}, {"R", r}, {"S", s}};
  std::string text = "Bp*F + Ap^2*G + (K + M/2)^2*R + (K + M/2)*Ap*S";
  if (u) {
    require_admissible(*u, kAmBm, "geodesic", "U");
    slots.emplace("U", *u);
    text += " + U";
  }
  return assemble(Family::geodesic, instantiate(text, slots), lambda, std::nullopt,
                  u ? "geodesic flow with potential U; quasi-integrable"
                    : "geodesic flow; quasi-integrable");
}

BuiltSystem build_subalgebra(Subalgebra sub, const Expr& h, const RealizationParams& lambda,
                             const std::optional<EParams>& e) {
  const SubalgebraDef def = subalgebra(sub, e);
  require_admissible(h, subalgebra_admissible_symbols(sub), "subalgebra " + def.name, "H");
  BuiltSystem sys = assemble(Family::subalgebra, h, lambda, e,
                             "defined on subalgebra " + def.name + "; extra integral C_" + def.name);
  sys.extra_integral = subalgebra_integral_observable(sub, lambda, e);
  sys.extra_integral_expr = Expr::symbol(casimir_symbol(sub));
  return sys;
}

BuiltSystem build_generator_family(Generator x, const Expr& h, const RealizationParams& lambda,
                                   const std::optional<EParams>& e) {
  const std::string name(symbol_name(x));
  require_admissible(h, generator_admissible_symbols(x), "generator " + name, "H");
  BuiltSystem sys =
      assemble(Family::generator, h, lambda, e, "commutes with generator " + name + "; extra integral " + name);
  sys.extra_integral = generator_observable(x, lambda).renamed("I");
  sys.extra_integral_expr = Expr::symbol(name);
  return sys;
}

BuiltSystem build_hk_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                              const RealizationParams& lambda) {
  for (const auto& [slot, e] : {std::pair{"F", &f}, {"G", &g}, {"R", &r}, {"S", &s}})
    require_admissible(*e, kCDm, "hk_geodesic", slot);
  const Expr h = instantiate(
      "C_gl2*F + (K + M/2)^2*G + C_h4^2*R + (K + M/2)*C_h4*S",
      {{"F", f}, {"G", g}, {"R", r}, {"S", s}});
  BuiltSystem sys = build_generator_family(Generator::K, h, lambda);
  sys.family = Family::hk_geodesic;
  sys.provenance = "K-integrable geodesic flow; extra integral K";
  return sys;
}

BuiltSystem build_aplus_natural(const Expr& f, const RealizationParams& lambda) {
  require_admissible(f, kCGm, "aplus_natural", "F");
  BuiltSystem sys =
      build_generator_family(Generator::Ap, instantiate("0.5*Bp + F", {{"F", f}}), lambda);
  sys.family = Family::aplus_natural;
  sys.provenance = "A+-integrable natural system; extra integral A+";
  return sys;
}

BuiltSystem build_aplus_em(const Expr& f, const Expr& g, const Expr& r,
                           const RealizationParams& lambda) {
  for (const auto& [slot, e] : {std::pair{"F", &f}, {"G", &g}, {"R", &r}})
    require_admissible(*e, kCGm, "aplus_em", slot);
  BuiltSystem sys = build_generator_family(
      Generator::Ap,
      instantiate("0.5*Bp + C_h4*G + Ap*R + F", {{"F", f}, {"G", g}, {"R", r}}), lambda);
  sys.family = Family::aplus_em;
  sys.provenance = "A+-integrable electromagnetic system; extra integral A+";
  return sys;
}

BuiltSystem build_aplus_geodesic(const Expr& f, const Expr& g, const Expr& r, const Expr& s,
                                 const Expr& t, const RealizationParams& lambda) {
  for (const auto& [slot, e] :
       {std::pair{"F", &f}, {"G", &g}, {"R", &r}, {"S", &s}, {"T", &t}})
    require_admissible(*e, kCGm, "aplus_geodesic", slot);
  BuiltSystem sys = build_generator_family(
      Generator::Ap,
      instantiate("C_h4^2*F + C_Gp*G + Bp*R + Ap^2*S + Ap*C_h4*T",
                  {{"F", f}, {"G", g}, {"R", r}, {"S", s}, {"T", t}}),
      lambda);
  sys.family = Family::aplus_geodesic;
  sys.provenance = "A+-integrable geodesic flow; extra integral A+";
  return sys;
}

BuiltSystem build_aminus_geodesic(const Expr& f, const Expr& g, const RealizationParams& lambda) {
  require_admissible(f, kMinusArgs, "aminus_geodesic", "F");
  require_admissible(g, kMinusArgs, "aminus_geodesic", "G");
  BuiltSystem sys = build_generator_family(
      Generator::Am, instantiate("C_h4^2*F + C_Gp*G", {{"F", f}, {"G", g}}), lambda);
  sys.family = Family::aminus_geodesic;
  sys.provenance = "A--integrable geodesic flow; extra integral A-";
  return sys;
}

BuiltSystem build_bminus_geodesic(const Expr& f, const RealizationParams& lambda) {
  require_admissible(f, kMinusArgs, "bminus_geodesic", "F");
  BuiltSystem sys =
      build_generator_family(Generator::Bm, instantiate("C_gl2*F", {{"F", f}}), lambda);
  sys.family = Family::bminus_geodesic;
  sys.provenance = "B--integrable geodesic flow; extra integral B-";
  return sys;
}

BuiltSystem build_bplus_geodesic(double alpha, double beta, double gamma, double delta,
                                 const RealizationParams& lambda) {
  const ConstantTable k{{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"delta", delta}};
  BuiltSystem sys = build_generator_family(
      Generator::Bp, instantiate("alpha*Bp + beta*Ap^2 + gamma*C_gl2 + delta*C_Gp", {}, k),
      lambda);
  sys.family = Family::bplus_geodesic;
  sys.provenance = "B+-integrable geodesic flow; extra integral B+";
  return sys;
}

BuiltSystem build_force_example(double a1, double a2, double a3, const RealizationParams& lambda) {
  require_nonzero(a1, "alpha1");
  require_nonzero(a3, "alpha3");
  const ConstantTable k{{"a1", a1}, {"a2", a2}, {"a3", a3}};
  const Expr h = instantiate("Bp*(a1*Am + a2*Bm + a3)", {}, k);
  const Expr i = instantiate(
      "4*a1*a2*Ap*(K + M/2) + 4*a2*a3*Bp + 4*a2^2*K*(K + M) - a1^2*C_Gp", {}, k);
  BuiltSystem sys = assemble(Family::force_example, h, lambda, std::nullopt,
                             "cubic geodesic-type flow; extra integral found by direct search");
  sys.extra_integral = compose(i, lambda, std::nullopt, "I");
  sys.extra_integral_expr = i;
  return sys;
}

BuiltSystem build(const HamiltonianSpec& spec, const RealizationParams& lambda,
                  const std::optional<EParams>& e) {
  const std::string fam(family_name(spec.family));
  auto allowed_slots = [&]() -> std::vector<std::string> {
    switch (spec.family) {
      case Family::generic:
      case Family::subalgebra:
      case Family::generator:
        return {"H"};
      case Family::natural:
      case Family::aplus_natural:
      case Family::bminus_geodesic:
        return {"F"};
      case Family::em:
      case Family::aplus_em:
        return {"F", "G", "R"};
      case Family::geodesic:
        return {"F", "G", "R", "S", "U"};
      case Family::hk_geodesic:
        return {"F", "G", "R", "S"};
      case Family::aplus_geodesic:
        return {"F", "G", "R", "S", "T"};
      case Family::aminus_geodesic:
        return {"F", "G"};
      case Family::bplus_geodesic:
      case Family::force_example:
        return {};
    }
    return {};
  }();
  for (const auto& [name, expr] : spec.slots)
    if (std::find(allowed_slots.begin(), allowed_slots.end(), name) == allowed_slots.end())
      throw ConfigError("slot " + name + " is not used by family " + fam);
  auto slot = [&](const char* name) {
    const auto it = spec.slots.find(name);
    return it == spec.slots.end() ? Expr::constant(0) : it->second;
  };
  auto required_slot = [&](const char* name) {
    const auto it = spec.slots.find(name);
    if (it == spec.slots.end()) throw ConfigError("family " + fam + " requires slot " + name);
    return it->second;
  };
  auto param = [&](const char* name) {
    const auto it = spec.parameters.find(name);
    if (it == spec.parameters.end()) throw ConfigError("family " + fam + " requires parameter " + name);
    return it->second;
  };
  switch (spec.family) {
    case Family::generic:
      return build_generic(required_slot("H"), lambda);
    case Family::natural:
      return build_natural(slot("F"), lambda);
    case Family::em:
      return build_em(slot("F"), slot("G"), slot("R"), lambda);
    case Family::geodesic: {
      std::optional<Expr> u;
      if (spec.slots.count("U")) u = spec.slots.find("U")->second;
      return build_geodesic(slot("F"), slot("G"), slot("R"), slot("S"), u, lambda);
    }
    case Family::subalgebra:
      if (!spec.subalgebra) throw ConfigError("family subalgebra requires a subalgebra name");
      return build_subalgebra(*spec.subalgebra, required_slot("H"), lambda, e);
    case Family::generator:
      if (!spec.generator) throw ConfigError("family generator requires a generator");
      return build_generator_family(*spec.generator, required_slot("H"), lambda, e);
    case Family::hk_geodesic:
      return build_hk_geodesic(slot("F"), slot("G"), slot("R"), slot("S"), lambda);
    case Family::aplus_natural:
      return build_aplus_natural(slot("F"), lambda);
    case Family::aplus_em:
      return build_aplus_em(slot("F"), slot("G"), slot("R"), lambda);
    case Family::aplus_geodesic:
      return build_aplus_geodesic(slot("F"), slot("G"), slot("R"), slot("S"), slot("T"), lambda);
    case Family::aminus_geodesic:
      return build_aminus_geodesic(slot("F"), slot("G"), lambda);
    case Family::bminus_geodesic:
      return build_bminus_geodesic(slot("F"), lambda);
    case Family::bplus_geodesic:
      return build_bplus_geodesic(param("alpha"), param("beta"), param("gamma"), param("delta"),
                                  lambda);
    case Family::force_example:
      return build_force_example(param("alpha1"), param("alpha2"), param("alpha3"), lambda);
  }
  throw ConfigError("unhandled family " + fam);
}

EMPotentials em_potentials(const Expr& f, const Expr& g, const Expr& r, const PhaseState& s,
                           const RealizationParams& lambda, double charge) {
  if (s.dof() != 3) throw Error("electromagnetic potentials need N = 3");
  require_nonzero(charge, "charge e");
  require_admissible(f, kAmBm, "em", "F");
  require_admissible(g, kAmBm, "em", "G");
  require_admissible(r, kAmBm, "em", "R");
  const H6Point pt = realize(s, lambda);
  const std::span<const double> b(pt.coords.data(), 6);
  const double fv = evaluate(f, generator_context(), b);
  const double gv = evaluate(g, generator_context(), b);
  const double rv = evaluate(r, generator_context(), b);
  EMPotentials pot;
  pot.charge = charge;
  for (int i = 0; i < 3; ++i) pot.A[i] = -(s.q[i] * fv + lambda[i] * gv) / charge;
  const double m = pt.M();
  pot.psi = rv / charge - m * fv / (2 * charge) -
            (pt.Bm() * fv * fv + 2 * pt.Am() * fv * gv + m * gv * gv) / (2 * charge);
  return pot;
}

double em_hamiltonian(const EMPotentials& pot, const PhaseState& s) {
  if (s.dof() != 3) throw Error("electromagnetic Hamiltonian needs N = 3");
  const Eigen::Vector3d kinetic = s.p - pot.charge * pot.A;
  return 0.5 * kinetic.squaredNorm() + pot.charge * pot.psi;
}

}  // namespace h6

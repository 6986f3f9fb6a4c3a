#include "h6/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "h6/integrals.hpp"

namespace h6 {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) fail(path + "/" + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

long long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::map<std::string, double, std::less<>> get_number_map(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object of numbers");
  std::map<std::string, double, std::less<>> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, get_number(v, path + "/" + k));
  return out;
}

ConstantTable constants_of(const HamiltonianConfig& h) {
  ConstantTable t(h.parameters.begin(), h.parameters.end());
  for (const auto& [k, v] : h.constants) t[k] = v;
  return t;
}

Expr parse_at(const std::string& text, const ConstantTable& constants, const std::string& path) {
  try {
    return parse(text, extended_context(), constants);
  } catch (const UnknownSymbolError& e) {
    fail(path, e.what());
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_keys(j, "", {"realization", "hamiltonian", "verify", "simulate"});
  RunConfig c;

  if (!j.contains("realization")) fail("/realization", "missing");
  const json& r = j["realization"];
  check_keys(r, "/realization", {"n", "lambda", "mu", "nu"});
  if (!r.contains("n")) fail("/realization/n", "missing");
  const long long n = get_integer(r["n"], "/realization/n");
  if (n < 1 || n > 64) fail("/realization/n", "must be between 1 and 64");
  c.realization.n = static_cast<int>(n);
  if (r.contains("lambda")) {
    c.realization.lambda = get_numbers(r["lambda"], "/realization/lambda");
    if (c.realization.lambda.size() != static_cast<std::size_t>(n))
      fail("/realization/lambda", "length " + std::to_string(c.realization.lambda.size()) +
                                      " differs from n = " + std::to_string(n));
  } else {
    c.realization.lambda.assign(static_cast<std::size_t>(n), 1.0);
  }
  double m = 0;
  for (double l : c.realization.lambda) m += l * l;
  if (!(m > 0)) fail("/realization/lambda", "sum of squares must be positive");
  if (r.contains("mu") != r.contains("nu")) fail("/realization", "mu and nu must be given together");
  if (r.contains("mu")) {
    EParams e{get_number(r["mu"], "/realization/mu"), get_number(r["nu"], "/realization/nu")};
    if (e.mu == 0 || e.nu == 0) fail("/realization", "mu and nu must be non-zero");
    c.realization.e_params = e;
  }

  if (!j.contains("hamiltonian")) fail("/hamiltonian", "missing");
  const json& h = j["hamiltonian"];
  check_keys(h, "/hamiltonian",
             {"family", "slots", "subalgebra", "generator", "parameters", "constants", "integral"});
  if (!h.contains("family")) fail("/hamiltonian/family", "missing");
  c.hamiltonian.family = get_string(h["family"], "/hamiltonian/family");
  if (!family_from_name(c.hamiltonian.family))
    fail("/hamiltonian/family", "unknown family '" + c.hamiltonian.family + "'");
  if (h.contains("slots")) {
    if (!h["slots"].is_object()) fail("/hamiltonian/slots", "expected an object of strings");
    for (const auto& [k, v] : h["slots"].items())
      c.hamiltonian.slots.emplace(k, get_string(v, "/hamiltonian/slots/" + k));
  }
  if (h.contains("subalgebra")) {
    c.hamiltonian.subalgebra = get_string(h["subalgebra"], "/hamiltonian/subalgebra");
    if (!subalgebra_from_name(*c.hamiltonian.subalgebra))
      fail("/hamiltonian/subalgebra", "unknown subalgebra '" + *c.hamiltonian.subalgebra + "'");
  }
  if (h.contains("generator")) {
    c.hamiltonian.generator = get_string(h["generator"], "/hamiltonian/generator");
    if (!generator_from_name(*c.hamiltonian.generator))
      fail("/hamiltonian/generator", "unknown generator '" + *c.hamiltonian.generator + "'");
  }
  if (h.contains("parameters"))
    c.hamiltonian.parameters = get_number_map(h["parameters"], "/hamiltonian/parameters");
  if (h.contains("constants")) {
    c.hamiltonian.constants = get_number_map(h["constants"], "/hamiltonian/constants");
    for (const auto& [k, v] : c.hamiltonian.constants)
      if (extended_context().contains(k) || function_from_name(k))
        fail("/hamiltonian/constants/" + k, "name is reserved");
  }
  if (h.contains("integral")) c.hamiltonian.integral = get_string(h["integral"], "/hamiltonian/integral");

  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_keys(v, "/verify", {"samples", "tol", "fd_tol", "seed"});
    if (v.contains("samples")) {
      const long long s = get_integer(v["samples"], "/verify/samples");
      if (s < 1 || s > 1000000) fail("/verify/samples", "must be between 1 and 1000000");
      c.verify.samples = static_cast<int>(s);
    }
    if (v.contains("tol")) {
      c.verify.tol = get_number(v["tol"], "/verify/tol");
      if (!(c.verify.tol > 0)) fail("/verify/tol", "must be positive");
    }
    if (v.contains("fd_tol")) {
      c.verify.fd_tol = get_number(v["fd_tol"], "/verify/fd_tol");
      if (!(c.verify.fd_tol > 0)) fail("/verify/fd_tol", "must be positive");
    }
    if (v.contains("seed")) {
      if (!v["seed"].is_number_unsigned() && !(v["seed"].is_number_integer() && v["seed"].get<long long>() >= 0))
        fail("/verify/seed", "expected a non-negative integer");
      c.verify.seed = v["seed"].get<std::uint64_t>();
    }
  }

  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, "/simulate", {"q0", "p0", "dt", "t_end", "observables"});
    SimulateConfig sim;
    if (!s.contains("q0")) fail("/simulate/q0", "missing");
    if (!s.contains("p0")) fail("/simulate/p0", "missing");
    sim.q0 = get_numbers(s["q0"], "/simulate/q0");
    sim.p0 = get_numbers(s["p0"], "/simulate/p0");
    if (sim.q0.size() != static_cast<std::size_t>(n)) fail("/simulate/q0", "length differs from n");
    if (sim.p0.size() != static_cast<std::size_t>(n)) fail("/simulate/p0", "length differs from n");
    if (s.contains("dt")) sim.dt = get_number(s["dt"], "/simulate/dt");
    if (!(sim.dt > 0)) fail("/simulate/dt", "must be positive");
    if (s.contains("t_end")) sim.t_end = get_number(s["t_end"], "/simulate/t_end");
    if (!(sim.t_end >= 0)) fail("/simulate/t_end", "must be non-negative");
    if (s.contains("observables")) {
      const json& o = s["observables"];
      if (!o.is_array()) fail("/simulate/observables", "expected an array of strings");
      for (std::size_t i = 0; i < o.size(); ++i)
        sim.observables.push_back(get_string(o[i], "/simulate/observables/" + std::to_string(i)));
    }
    c.simulate = std::move(sim);
  }

  // Slots must parse now so that errors carry their path.
  const ConstantTable k = constants_of(c.hamiltonian);
  for (const auto& [slot, text] : c.hamiltonian.slots) parse_at(text, k, "/hamiltonian/slots/" + slot);
  if (c.hamiltonian.integral) parse_at(*c.hamiltonian.integral, k, "/hamiltonian/integral");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json r{{"n", c.realization.n}, {"lambda", c.realization.lambda}};
  if (c.realization.e_params) {
    r["mu"] = c.realization.e_params->mu;
    r["nu"] = c.realization.e_params->nu;
  }
  json h{{"family", c.hamiltonian.family}, {"slots", json::object()}};
  for (const auto& [k, v] : c.hamiltonian.slots) h["slots"][k] = v;
  if (c.hamiltonian.subalgebra) h["subalgebra"] = *c.hamiltonian.subalgebra;
  if (c.hamiltonian.generator) h["generator"] = *c.hamiltonian.generator;
  h["parameters"] = json::object();
  for (const auto& [k, v] : c.hamiltonian.parameters) h["parameters"][k] = v;
  h["constants"] = json::object();
  for (const auto& [k, v] : c.hamiltonian.constants) h["constants"][k] = v;
  if (c.hamiltonian.integral) h["integral"] = *c.hamiltonian.integral;
  json out{{"realization", r},
           {"hamiltonian", h},
           {"verify",
            {{"samples", c.verify.samples},
             {"tol", c.verify.tol},
             {"fd_tol", c.verify.fd_tol},
             {"seed", c.verify.seed}}}};
  if (c.simulate)
    out["simulate"] = {{"q0", c.simulate->q0},
                       {"p0", c.simulate->p0},
                       {"dt", c.simulate->dt},
                       {"t_end", c.simulate->t_end},
                       {"observables", c.simulate->observables}};
  return out;
}

RealizationParams realization_params(const RunConfig& c) {
  return RealizationParams(
      Eigen::Map<const Eigen::VectorXd>(c.realization.lambda.data(),
                                        static_cast<Eigen::Index>(c.realization.lambda.size())));
}

HamiltonianSpec hamiltonian_spec(const RunConfig& c) {
  HamiltonianSpec spec;
  spec.family = *family_from_name(c.hamiltonian.family);
  const ConstantTable k = constants_of(c.hamiltonian);
  for (const auto& [slot, text] : c.hamiltonian.slots)
    spec.slots.emplace(slot, parse_at(text, k, "/hamiltonian/slots/" + slot));
  if (c.hamiltonian.subalgebra) spec.subalgebra = subalgebra_from_name(*c.hamiltonian.subalgebra);
  if (c.hamiltonian.generator) spec.generator = generator_from_name(*c.hamiltonian.generator);
  spec.parameters = c.hamiltonian.parameters;
  return spec;
}

BuiltSystem build_system(const RunConfig& c) {
  const RealizationParams lambda = realization_params(c);
  BuiltSystem sys = build(hamiltonian_spec(c), lambda, c.realization.e_params);
  if (c.hamiltonian.integral) {
    const Expr i = parse_at(*c.hamiltonian.integral, constants_of(c.hamiltonian), "/hamiltonian/integral");
    sys.extra_integral = compose(i, lambda, c.realization.e_params, "I");
    sys.extra_integral_expr = i;
  }
  return sys;
}

Observable resolve_observable(const std::string& name, const BuiltSystem& sys, const RunConfig& c) {
  const RealizationParams lambda = realization_params(c);
  const int n = lambda.dof();
  std::smatch m;
  static const std::regex coord(R"(([qp])(\d+))");
  static const std::regex indexed(R"((C_left|C_right|M)\[(\d+)\])");
  static const std::regex jij(R"(J\[(\d+),(\d+)\])");
  static const std::regex sub(R"(C_sub\[(\w+)\])");
  try {
    if (name == "H") return sys.hamiltonian;
    if (name == "I") {
      if (!sys.extra_integral) throw ConfigError("observable I: the system has no extra integral");
      return *sys.extra_integral;
    }
    if (std::regex_match(name, m, coord)) {
      const int i = std::stoi(m[2]);
      return m[1] == "q" ? coordinate_q(i, n) : coordinate_p(i, n);
    }
    if (std::regex_match(name, m, indexed)) {
      const int k = std::stoi(m[2]);
      if (m[1] == "C_left") return left_integral_observable(k, lambda);
      if (m[1] == "C_right") return right_integral_observable(k, lambda);
      return trivial_integral_observable(k, lambda);
    }
    if (std::regex_match(name, m, jij)) return angular_momentum_observable(std::stoi(m[1]), std::stoi(m[2]), n);
    if (std::regex_match(name, m, sub)) {
      const auto s = subalgebra_from_name(m[1].str());
      if (!s) throw ConfigError("unknown subalgebra '" + m[1].str() + "'");
      return subalgebra_integral_observable(*s, lambda, c.realization.e_params);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("observable " + name + ": " + e.what());
  } catch (const std::out_of_range&) {
    throw ConfigError("observable " + name + ": index out of range");
  }
  const Expr e = parse_at(name, constants_of(c.hamiltonian), "observable " + name);
  return compose(e, lambda, c.realization.e_params, name);
}

std::vector<Observable> resolve_observables(const std::vector<std::string>& names,
                                            const BuiltSystem& sys, const RunConfig& c) {
  std::vector<Observable> out;
  const RealizationParams lambda = realization_params(c);
  for (const std::string& name : names) {
    if (name == "integrals") {
      for (Observable& o : left_integral_observables(lambda)) out.push_back(std::move(o));
      for (Observable& o : right_integral_observables(lambda)) out.push_back(std::move(o));
    } else {
      out.push_back(resolve_observable(name, sys, c));
    }
  }
  return out;
}

std::string config_hash(const json& resolved) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : resolved.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json report_json(const VerificationReport& report, const json& resolved, std::uint64_t seed) {
  json checks = json::array();
  for (const CheckRecord& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"n", c.n},
                      {"samples", c.samples},
                      {"seed", c.seed},
                      {"max_residual", c.max_residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"worst", c.worst}});
  json ranks = json::array();
  for (const RankRecord& r : report.ranks)
    ranks.push_back({{"name", r.name},
                     {"functions", r.functions},
                     {"rank", r.rank},
                     {"expected", r.expected},
                     {"independent", r.independent()}});
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"seed", seed},
              {"config_hash", config_hash(resolved)},
              {"config", resolved},
              {"checks", checks},
              {"ranks", ranks},
              {"verdict", report.pass() ? "pass" : "fail"}};
}

}  // namespace h6

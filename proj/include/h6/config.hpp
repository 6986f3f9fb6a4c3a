#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "h6/families.hpp"
#include "h6/verify.hpp"

namespace h6 {

inline constexpr const char* kToolName = "h6tool";
inline constexpr const char* kToolVersion = "1.0.0";

struct RealizationConfig {
  int n = 0;
  std::vector<double> lambda;
  std::optional<EParams> e_params;
};

struct HamiltonianConfig {
  std::string family = "generic";
  /// Expression strings keyed by slot name.
  std::map<std::string, std::string, std::less<>> slots;
  std::optional<std::string> subalgebra;
  std::optional<std::string> generator;
  std::map<std::string, double, std::less<>> parameters;
  /// Named constants usable inside slot expressions.
  std::map<std::string, double, std::less<>> constants;
  /// Replaces the construction's extra integral with a candidate to test.
  std::optional<std::string> integral;
};

struct VerifyConfig {
  int samples = 100;
  double tol = 1e-9;
  double fd_tol = 1e-5;
  std::uint64_t seed = 42;
};

struct SimulateConfig {
  std::vector<double> q0;
  std::vector<double> p0;
  double dt = 1e-3;
  double t_end = 10.0;
  /// Empty selects H, the extra integral and every coproduct integral.
  std::vector<std::string> observables;
};

struct RunConfig {
  RealizationConfig realization;
  HamiltonianConfig hamiltonian;
  VerifyConfig verify;
  std::optional<SimulateConfig> simulate;
};

/// Throws `ConfigError` with a JSON-pointer style path, e.g. "/realization/lambda/2".
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Fully resolved config, defaults filled in. `parse_config(to_json(c))` reproduces `c`.
nlohmann::json to_json(const RunConfig& c);

RealizationParams realization_params(const RunConfig& c);
/// Parses the slots and resolves names. Parse errors become `ConfigError`.
HamiltonianSpec hamiltonian_spec(const RunConfig& c);
/// Builds the system and applies the `integral` override.
BuiltSystem build_system(const RunConfig& c);

/// Observable by name: H, I, q<i>, p<i>, J[i,j], C_left[m], C_right[m],
/// M[m], C_sub[name], or else an expression over the extended symbols.
Observable resolve_observable(const std::string& name, const BuiltSystem& sys, const RunConfig& c);
/// The list `names`, with "integrals" expanding to every C_left and C_right.
std::vector<Observable> resolve_observables(const std::vector<std::string>& names,
                                            const BuiltSystem& sys, const RunConfig& c);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved);

nlohmann::json report_json(const VerificationReport& report, const nlohmann::json& resolved,
                           std::uint64_t seed);

}  // namespace h6

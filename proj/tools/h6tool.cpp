// h6tool: verification, simulation and axiom checks for two-photon
// coalgebra Hamiltonians.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "h6/config.hpp"
#include "h6/dynamics.hpp"
#include "h6/verify.hpp"

namespace {

enum Exit : int { kPass = 0, kVerifyFail = 1, kConfigError = 2, kBlowUp = 3 };

int default_threads() {
  if (const char* env = std::getenv("H6_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw h6::ConfigError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

void print_summary(const h6::VerificationReport& report) {
  for (const h6::CheckRecord& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " n=" << c.n
              << " max_residual=" << h6::format_double(c.max_residual)
              << " tol=" << h6::format_double(c.tolerance) << '\n';
  for (const h6::RankRecord& r : report.ranks)
    std::cout << "RANK " << r.name << " rank=" << r.rank << " expected=" << r.expected
              << (r.independent() ? "" : " (dependent)") << '\n';
  std::cout << "verdict: " << (report.pass() ? "pass" : "fail") << '\n';
}

struct VerifyArgs {
  std::string config, report;
  std::optional<int> samples;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  int threads = default_threads();
};

int run_verify(const VerifyArgs& a) {
  h6::RunConfig cfg = h6::load_config(a.config);
  if (a.samples) {
    if (*a.samples < 1) throw h6::ConfigError("--samples must be positive");
    cfg.verify.samples = *a.samples;
  }
  if (a.tol) {
    if (!(*a.tol > 0)) throw h6::ConfigError("--tol must be positive");
    cfg.verify.tol = *a.tol;
  }
  if (a.seed) cfg.verify.seed = *a.seed;
  const nlohmann::json resolved = h6::to_json(cfg);
  h6::build_system(cfg);  // surfaces build errors before any sampling
  const h6::VerificationReport report = h6::run_suite(cfg, a.threads);
  write_json(a.report, h6::report_json(report, resolved, cfg.verify.seed));
  print_summary(report);
  return report.pass() ? kPass : kVerifyFail;
}

struct SimulateArgs {
  std::string config, out;
  int threads = default_threads();
};

int run_simulate(const SimulateArgs& a) {
  const h6::RunConfig cfg = h6::load_config(a.config);
  if (!cfg.simulate) throw h6::ConfigError(a.config + ": /simulate: missing");
  const h6::SimulateConfig& sim = *cfg.simulate;
  const h6::BuiltSystem sys = h6::build_system(cfg);
  std::vector<std::string> names = sim.observables;
  if (names.empty()) {
    names.push_back("H");
    if (sys.extra_integral) names.push_back("I");
    names.push_back("integrals");
  }
  const std::vector<h6::Observable> obs = h6::resolve_observables(names, sys, cfg);
  const h6::PhaseState s0(
      Eigen::Map<const Eigen::VectorXd>(sim.q0.data(), static_cast<Eigen::Index>(sim.q0.size())),
      Eigen::Map<const Eigen::VectorXd>(sim.p0.data(), static_cast<Eigen::Index>(sim.p0.size())));
  const h6::Trajectory traj =
      h6::integrate(sys.hamiltonian, s0, sim.dt, h6::steps_for(sim.t_end, sim.dt), obs);

  {
    std::ofstream csv(a.out);
    if (!csv) throw h6::ConfigError(a.out + ": cannot open for writing");
    h6::write_csv(csv, traj);
  }
  nlohmann::json drift = nlohmann::json::array();
  for (const h6::Drift& d : h6::drift_report(traj))
    drift.push_back({{"name", d.name}, {"initial", d.initial}, {"max_relative_drift", d.max_relative}});
  const nlohmann::json resolved = h6::to_json(cfg);
  const nlohmann::json summary{{"tool", h6::kToolName},
                               {"version", h6::kToolVersion},
                               {"config_hash", h6::config_hash(resolved)},
                               {"config", resolved},
                               {"steps", traj.size() ? traj.size() - 1 : 0},
                               {"termination", h6::termination_name(traj.termination)},
                               {"diagnostic", traj.diagnostic},
                               {"drift", drift}};
  std::filesystem::path summary_path(a.out);
  summary_path.replace_extension(".drift.json");
  write_json(summary_path.string(), summary);

  for (const h6::Drift& d : h6::drift_report(traj))
    std::cout << d.name << " drift=" << h6::format_double(d.max_relative) << '\n';
  if (!traj.completed()) {
    std::cerr << "h6tool: " << traj.diagnostic << '\n';
    return kBlowUp;
  }
  return kPass;
}

struct AxiomArgs {
  int n = 0;
  int samples = 200;
  std::uint64_t seed = 42;
  std::optional<std::string> report;
  int threads = default_threads();
};

int run_check_axioms(const AxiomArgs& a) {
  if (a.n < 1 || a.n > 64) throw h6::ConfigError("--n must be between 1 and 64");
  if (a.samples < 1) throw h6::ConfigError("--samples must be positive");
  h6::StateSampler rng(a.seed);
  const h6::RealizationParams lambda = rng.lambda(a.n);
  const h6::CheckOptions opts{a.threads, false};
  h6::VerificationReport report;
  report.checks.push_back(h6::check_bracket_table(a.n, lambda, a.samples, 1e-9, a.seed + 1, opts));
  report.checks.push_back(h6::check_jacobi(a.samples, 1e-12, a.seed + 2));
  report.checks.push_back(
      h6::check_casimir_identity(a.n, lambda, a.samples, 1e-10, a.seed + 3, opts));
  nlohmann::json resolved{{"check_axioms",
                           {{"n", a.n},
                            {"samples", a.samples},
                            {"seed", a.seed},
                            {"lambda", std::vector<double>(lambda.lambda().begin(), lambda.lambda().end())}}}};
  const nlohmann::json j = h6::report_json(report, resolved, a.seed);
  if (a.report)
    write_json(*a.report, j);
  else
    std::cout << j.dump(2) << '\n';
  if (a.report) print_summary(report);
  return report.pass() ? kPass : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon coalgebra integrable systems: verification and simulation"};
  app.set_version_flag("--version", std::string(h6::kToolVersion));
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the property suite for a configured Hamiltonian");
  verify->add_option("--config", va.config, "JSON config")->required();
  verify->add_option("--report", va.report, "Output JSON report")->required();
  verify->add_option("--samples", va.samples, "Samples per check");
  verify->add_option("--tol", va.tol, "Bracket tolerance");
  verify->add_option("--seed", va.seed, "Sampling seed");
  verify->add_option("--threads", va.threads, "Worker threads (default: H6_THREADS or all cores)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Integrate the flow and report conservation drift");
  simulate->add_option("--config", sa.config, "JSON config")->required();
  simulate->add_option("--out", sa.out, "Trajectory CSV; the drift summary goes next to it")->required();
  simulate->add_option("--threads", sa.threads, "Worker threads");

  AxiomArgs aa;
  auto* axioms = app.add_subcommand("check-axioms", "Bracket table, Jacobi and Casimir identity at N sites");
  axioms->add_option("--n", aa.n, "Number of sites")->required();
  axioms->add_option("--samples", aa.samples, "Samples per check");
  axioms->add_option("--seed", aa.seed, "Sampling seed");
  axioms->add_option("--report", aa.report, "Write the JSON report here instead of standard output");
  axioms->add_option("--threads", aa.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*verify) return run_verify(va);
    if (*simulate) return run_simulate(sa);
    if (*axioms) return run_check_axioms(aa);
  } catch (const h6::ConfigError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kConfigError;
  } catch (const h6::AdmissibilityError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kConfigError;
  } catch (const h6::ParseError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kConfigError;
  } catch (const h6::UnknownSymbolError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kConfigError;
  } catch (const h6::SingularityError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kBlowUp;
  } catch (const h6::DomainError& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kBlowUp;
  } catch (const h6::Error& e) {
    std::cerr << "h6tool: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "h6/algebra.hpp"
#include "h6/expr.hpp"
#include "h6/poisson.hpp"
#include "h6/realization.hpp"

namespace h6 {

struct CheckRecord {
  std::string name;
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  /// Largest normalized residual: |r| / (1 + scale), or |r| for absolute checks.
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Where the largest residual occurred.
  std::string worst;
};

struct RankRecord {
  std::string name;
  std::vector<std::string> functions;
  int rank = 0;
  int expected = 0;
  bool independent() const { return rank == expected; }
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  /// Informational: a shortfall flags a dependent set but does not fail the report.
  std::vector<RankRecord> ranks;
  bool pass() const;
};

/// Uniform sampling of the default domain: q, p in [-2, 2], lambda in [0.5, 2].
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  int integer(int lo, int hi);  // inclusive
  PhaseState state(int n, double range = 2.0);
  RealizationParams lambda(int n);
  H6Point h6_point(double range = 2.0);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// `count` states; states where any guard fires are redrawn.
std::vector<PhaseState> sample_states(int n, int count, std::uint64_t seed,
                                      const std::vector<Observable>& guarded = {});

struct CheckOptions {
  int threads = 1;
  /// Residuals compared to tol directly instead of tol * (1 + |f| |g|).
  bool absolute = false;
};

/// Random expression over `symbols` of depth <= `max_depth`, built from
/// +, -, *, squares and constants in [-2, 2].
Expr random_expr(StateSampler& rng, const std::vector<std::string>& symbols, int max_depth = 4);

using RealizeFn = std::function<GeneratorFrame(const PhaseState&, const RealizationParams&)>;

/// All 15 generator brackets against the table, on realized coordinates.
CheckRecord check_bracket_table(int n, const RealizationParams& lambda, int samples, double tol,
                                std::uint64_t seed, const CheckOptions& opts = {},
                                const RealizeFn& realization = realize_with_gradients);

/// Jacobi identity of the structure constants at random points of h6*.
CheckRecord check_jacobi(int samples, double tol, std::uint64_t seed);

/// M C_h6 = C_Gp C_Gm - C_h4^2 on realized states.
CheckRecord check_casimir_identity(int n, const RealizationParams& lambda, int samples, double tol,
                                   std::uint64_t seed, const CheckOptions& opts = {});

/// Max over listed pairs and states of the normalized bracket.
CheckRecord check_pairs(std::string name,
                        const std::vector<std::pair<Observable, Observable>>& pairs, int samples,
                        double tol, std::uint64_t seed, const CheckOptions& opts = {});

/// All pairwise brackets of `fs`.
CheckRecord check_involution(std::string name, const std::vector<Observable>& fs, int samples,
                             double tol, std::uint64_t seed, const CheckOptions& opts = {});

/// {h, f} for every f in `fs`.
CheckRecord check_commuting(std::string name, const Observable& h,
                            const std::vector<Observable>& fs, int samples, double tol,
                            std::uint64_t seed, const CheckOptions& opts = {});

/// Exact-gradient against finite-difference brackets.
CheckRecord check_fd_oracle(std::string name,
                            const std::vector<std::pair<Observable, Observable>>& pairs,
                            int samples, double tol, std::uint64_t seed,
                            const CheckOptions& opts = {}, double step = kDefaultFdStep);

/// Numeric rank of the 2N-column Jacobian of `fs` at `s`.
int jacobian_rank(const std::vector<Observable>& fs, const PhaseState& s);

/// Max rank over samples. `expected` defaults to the number of functions.
RankRecord independence_rank(std::string name, const std::vector<Observable>& fs, int samples,
                             std::uint64_t seed, std::optional<int> expected = std::nullopt);

/// Left integrals C^(3..N) followed by right integrals C_(3..N-1). Their
/// union is the whole coproduct family without the repeated C_(N) = C^(N).
std::vector<Observable> coproduct_integrals(const RealizationParams& lambda);
std::vector<Observable> left_integral_observables(const RealizationParams& lambda);
std::vector<Observable> right_integral_observables(const RealizationParams& lambda);

struct RunConfig;  // config.hpp

/// Every check that applies to the configured system.
VerificationReport run_suite(const RunConfig& config, int threads = 1);

}  // namespace h6

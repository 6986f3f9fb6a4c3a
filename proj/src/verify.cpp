#include "h6/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include "h6/config.hpp"
#include "h6/integrals.hpp"

namespace h6 {

namespace {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception by index is rethrown after all workers join.
template <typename Fn>
void parallel_for(int count, int threads, Fn fn) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Sample {
  double residual = 0.0;
  std::string where;
};

/// Order-independent reduction: the largest residual wins, ties go to the
/// lowest sample index.
CheckRecord reduce(std::string name, int n, std::uint64_t seed, double tol,
                   const std::vector<Sample>& samples) {
  CheckRecord r;
  r.name = std::move(name);
  r.n = n;
  r.samples = static_cast<int>(samples.size());
  r.seed = seed;
  r.tolerance = tol;
  bool finite = true;
  for (const Sample& s : samples) {
    if (!std::isfinite(s.residual)) {
      if (finite) r.worst = s.where + " (non-finite)";
      finite = false;
      r.max_residual = s.residual;
      continue;
    }
    if (finite && s.residual > r.max_residual) {
      r.max_residual = s.residual;
      r.worst = s.where;
    }
  }
  r.pass = finite && r.max_residual <= tol;
  return r;
}

double normalized(double residual, double scale, bool absolute) {
  return absolute ? std::abs(residual) : std::abs(residual) / (1.0 + std::abs(scale));
}

std::string describe_state(const PhaseState& s) {
  std::ostringstream os;
  os << "q=(";
  for (int i = 0; i < s.dof(); ++i) os << (i ? "," : "") << format_double(s.q[i]);
  os << ") p=(";
  for (int i = 0; i < s.dof(); ++i) os << (i ? "," : "") << format_double(s.p[i]);
  os << ")";
  return os.str();
}

std::vector<Observable> guarded_of(const std::vector<std::pair<Observable, Observable>>& pairs) {
  std::vector<Observable> out;
  for (const auto& [f, g] : pairs) {
    out.push_back(f);
    out.push_back(g);
  }
  return out;
}

int pairs_dof(const std::vector<std::pair<Observable, Observable>>& pairs) {
  if (pairs.empty()) throw Error("no observable pairs to check");
  const int n = pairs.front().first.dof();
  for (const auto& [f, g] : pairs)
    if (f.dof() != n || g.dof() != n) throw Error("observables disagree on degrees of freedom");
  return n;
}

}  // namespace

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

double StateSampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

int StateSampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

PhaseState StateSampler::state(int n, double range) {
  if (n < 1) throw Error("state needs at least one degree of freedom");
  Eigen::VectorXd q(n), p(n);
  for (int i = 0; i < n; ++i) q[i] = uniform(-range, range);
  for (int i = 0; i < n; ++i) p[i] = uniform(-range, range);
  return PhaseState(q, p);
}

RealizationParams StateSampler::lambda(int n) {
  Eigen::VectorXd l(n);
  for (int i = 0; i < n; ++i) l[i] = uniform(0.5, 2.0);
  return RealizationParams(l);
}

H6Point StateSampler::h6_point(double range) {
  H6Point g;
  for (int i = 0; i < 6; ++i) g.coords[i] = uniform(-range, range);
  return g;
}

std::vector<PhaseState> sample_states(int n, int count, std::uint64_t seed,
                                      const std::vector<Observable>& guarded) {
  StateSampler rng(seed);
  std::vector<PhaseState> out;
  out.reserve(count);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 100 * (count + 10))
      throw Error("could not draw states away from the singular set");
    PhaseState s = rng.state(n);
    const bool near = std::any_of(guarded.begin(), guarded.end(),
                                  [&](const Observable& o) { return o.singularity(s).has_value(); });
    if (!near) out.push_back(std::move(s));
  }
  return out;
}

Expr random_expr(StateSampler& rng, const std::vector<std::string>& symbols, int max_depth) {
  auto leaf = [&]() {
    if (!symbols.empty() && rng.uniform(0, 1) < 0.8)
      return Expr::symbol(symbols[rng.integer(0, static_cast<int>(symbols.size()) - 1)]);
    return Expr::constant(std::round(rng.uniform(-2, 2) * 100) / 100);
  };
  std::function<Expr(int)> grow = [&](int depth) -> Expr {
    if (depth <= 1 || rng.uniform(0, 1) < 0.2) return leaf();
    switch (rng.integer(0, 3)) {
      case 0: return grow(depth - 1) + grow(depth - 1);
      case 1: return grow(depth - 1) - grow(depth - 1);
      case 2: return grow(depth - 1) * grow(depth - 1);
      default: return pow(grow(depth - 1), Expr::constant(2));
    }
  };
  for (;;) {
    Expr e = grow(std::max(1, max_depth));
    if (symbols.empty() || !e.symbols().empty()) return e;
  }
}

CheckRecord check_bracket_table(int n, const RealizationParams& lambda, int samples, double tol,
                                std::uint64_t seed, const CheckOptions& opts,
                                const RealizeFn& realization) {
  if (n != lambda.dof()) throw Error("bracket table: lambda length differs from N");
  const std::vector<PhaseState> states = sample_states(n, samples, seed);
  std::vector<CompiledExpr> table;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b)
      table.emplace_back(abstract_bracket(kGenerators[a], kGenerators[b]), generator_context());
  std::vector<Sample> out(states.size());
  parallel_for(samples, opts.threads, [&](int k) {
    const GeneratorFrame f = realization(states[k], lambda);
    const auto& jac = f.jacobian;
    std::size_t idx = 0;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b, ++idx) {
        const double lhs = jac.row(a).head(n).dot(jac.row(b).tail(n)) -
                           jac.row(b).head(n).dot(jac.row(a).tail(n));
        const double rhs = table[idx].value(std::span<const double>(f.values.coords.data(), 6));
        const double res =
            normalized(lhs - rhs, f.values.coords[a] * f.values.coords[b], opts.absolute);
        if (res > out[k].residual || !std::isfinite(res)) {
          out[k].residual = res;
          out[k].where = "{" + std::string(symbol_name(kGenerators[a])) + "," +
                         std::string(symbol_name(kGenerators[b])) + "} at " +
                         describe_state(states[k]);
        }
      }
  });
  return reduce("bracket_table", n, seed, tol, out);
}

CheckRecord check_jacobi(int samples, double tol, std::uint64_t seed) {
  StateSampler rng(seed);
  std::vector<Sample> out(samples);
  auto sym = [](Generator g) { return Expr::symbol(std::string(symbol_name(g))); };
  for (int k = 0; k < samples; ++k) {
    const H6Point g = rng.h6_point();
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int c = b + 1; c < 6; ++c) {
          const Generator x = kGenerators[a], y = kGenerators[b], z = kGenerators[c];
          const double j = lie_poisson_bracket(sym(x), abstract_bracket(y, z), g) +
                           lie_poisson_bracket(sym(y), abstract_bracket(z, x), g) +
                           lie_poisson_bracket(sym(z), abstract_bracket(x, y), g);
          const double res = normalized(j, g.coords.norm(), false);
          if (res > out[k].residual) {
            out[k].residual = res;
            out[k].where = std::string(symbol_name(x)) + "," + std::string(symbol_name(y)) + "," +
                           std::string(symbol_name(z));
          }
        }
  }
  return reduce("jacobi", 6, seed, tol, out);
}

CheckRecord check_casimir_identity(int n, const RealizationParams& lambda, int samples, double tol,
                                   std::uint64_t seed, const CheckOptions& opts) {
  if (n != lambda.dof()) throw Error("Casimir identity: lambda length differs from N");
  const std::vector<PhaseState> states = sample_states(n, samples, seed);
  std::vector<Sample> out(states.size());
  parallel_for(samples, opts.threads, [&](int k) {
    const PhaseState& s = states[k];
    const double gp = subalgebra_integral(Subalgebra::Gp, s, lambda);
    const double gm = subalgebra_integral(Subalgebra::Gm, s, lambda);
    const double h4 = subalgebra_integral(Subalgebra::h4, s, lambda);
    const double scale = std::abs(gp * gm) + h4 * h4;
    out[k].residual = normalized(casimir_identity_residual(s, lambda), scale, opts.absolute);
    out[k].where = describe_state(s);
  });
  return reduce("casimir_identity", n, seed, tol, out);
}

CheckRecord check_pairs(std::string name,
                        const std::vector<std::pair<Observable, Observable>>& pairs, int samples,
                        double tol, std::uint64_t seed, const CheckOptions& opts) {
  const int n = pairs_dof(pairs);
  const std::vector<PhaseState> states = sample_states(n, samples, seed, guarded_of(pairs));
  std::vector<Sample> out(states.size());
  parallel_for(samples, opts.threads, [&](int k) {
    const PhaseState& s = states[k];
    for (const auto& [f, g] : pairs) {
      const ValueGradient a = f.evaluate(s);
      const ValueGradient b = g.evaluate(s);
      const double br =
          a.gradient.head(n).dot(b.gradient.tail(n)) - b.gradient.head(n).dot(a.gradient.tail(n));
      const double res = normalized(br, a.value * b.value, opts.absolute);
      if (res > out[k].residual || !std::isfinite(res)) {
        out[k].residual = res;
        out[k].where = "{" + f.name() + "," + g.name() + "} at " + describe_state(s);
        if (!std::isfinite(res)) break;
      }
    }
  });
  return reduce(std::move(name), n, seed, tol, out);
}

CheckRecord check_involution(std::string name, const std::vector<Observable>& fs, int samples,
                             double tol, std::uint64_t seed, const CheckOptions& opts) {
  std::vector<std::pair<Observable, Observable>> pairs;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j) pairs.emplace_back(fs[i], fs[j]);
  if (pairs.empty()) throw Error("involution check needs at least two observables");
  return check_pairs(std::move(name), pairs, samples, tol, seed, opts);
}

CheckRecord check_commuting(std::string name, const Observable& h,
                            const std::vector<Observable>& fs, int samples, double tol,
                            std::uint64_t seed, const CheckOptions& opts) {
  std::vector<std::pair<Observable, Observable>> pairs;
  for (const Observable& f : fs) pairs.emplace_back(h, f);
  return check_pairs(std::move(name), pairs, samples, tol, seed, opts);
}

CheckRecord check_fd_oracle(std::string name,
                            const std::vector<std::pair<Observable, Observable>>& pairs,
                            int samples, double tol, std::uint64_t seed, const CheckOptions& opts,
                            double step) {
  const int n = pairs_dof(pairs);
  const std::vector<PhaseState> states = sample_states(n, samples, seed, guarded_of(pairs));
  std::vector<Sample> out(states.size());
  parallel_for(samples, opts.threads, [&](int k) {
    const PhaseState& s = states[k];
    for (const auto& [f, g] : pairs) {
      const double exact = bracket(f, g, s);
      const double fd = fd_bracket(f, g, s, step);
      const double scale = f.value(s) * g.value(s);
      const double res = normalized(exact - fd, std::max(std::abs(exact), std::abs(scale)),
                                    opts.absolute);
      if (res > out[k].residual || !std::isfinite(res)) {
        out[k].residual = res;
        out[k].where = "{" + f.name() + "," + g.name() + "} at " + describe_state(s);
      }
    }
  });
  return reduce(std::move(name), n, seed, tol, out);
}

int jacobian_rank(const std::vector<Observable>& fs, const PhaseState& s) {
  if (fs.empty()) throw Error("rank needs at least one function");
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(fs.size()), 2 * s.dof());
  for (std::size_t i = 0; i < fs.size(); ++i)
    jac.row(static_cast<Eigen::Index>(i)) = fs[i].evaluate(s).gradient.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double threshold = 1e-8 * sv[0];
  return static_cast<int>((sv.array() > threshold).count());
}

RankRecord independence_rank(std::string name, const std::vector<Observable>& fs, int samples,
                             std::uint64_t seed, std::optional<int> expected) {
  if (fs.empty()) throw Error("rank needs at least one function");
  RankRecord r;
  r.name = std::move(name);
  for (const Observable& f : fs) r.functions.push_back(f.name());
  r.expected = expected.value_or(static_cast<int>(fs.size()));
  for (const PhaseState& s : sample_states(fs.front().dof(), samples, seed, fs))
    r.rank = std::max(r.rank, jacobian_rank(fs, s));
  return r;
}

std::vector<Observable> left_integral_observables(const RealizationParams& lambda) {
  std::vector<Observable> out;
  for (int m = 3; m <= lambda.dof(); ++m) out.push_back(left_integral_observable(m, lambda));
  return out;
}

std::vector<Observable> right_integral_observables(const RealizationParams& lambda) {
  std::vector<Observable> out;
  for (int m = 3; m <= lambda.dof(); ++m) out.push_back(right_integral_observable(m, lambda));
  return out;
}

std::vector<Observable> coproduct_integrals(const RealizationParams& lambda) {
  std::vector<Observable> out = left_integral_observables(lambda);
  for (int m = 3; m < lambda.dof(); ++m) out.push_back(right_integral_observable(m, lambda));
  return out;
}

VerificationReport run_suite(const RunConfig& config, int threads) {
  const RealizationParams lambda = realization_params(config);
  const BuiltSystem sys = build_system(config);
  const int n = lambda.dof();
  const VerifyConfig& v = config.verify;
  const CheckOptions opts{threads, false};
  // Each check draws from its own stream so adding a check leaves the others unchanged.
  auto seed_for = [&](std::uint64_t k) { return v.seed + 0x9E3779B97F4A7C15ULL * k; };

  VerificationReport report;
  report.checks.push_back(check_bracket_table(n, lambda, v.samples, v.tol, seed_for(1), opts));
  report.checks.push_back(check_jacobi(v.samples, v.tol, seed_for(2)));
  report.checks.push_back(check_casimir_identity(n, lambda, v.samples, v.tol, seed_for(3), opts));

  const std::vector<Observable> left = left_integral_observables(lambda);
  const std::vector<Observable> right = right_integral_observables(lambda);
  if (left.size() >= 2) {
    report.checks.push_back(
        check_involution("involution_left", left, v.samples, v.tol, seed_for(4), opts));
    report.checks.push_back(
        check_involution("involution_right", right, v.samples, v.tol, seed_for(5), opts));
  }
  std::vector<Observable> all = left;
  all.insert(all.end(), right.begin(), right.end());
  if (!all.empty())
    report.checks.push_back(check_commuting("universality", sys.hamiltonian, all, v.samples, v.tol,
                                            seed_for(6), opts));
  if (sys.extra_integral)
    report.checks.push_back(check_commuting("extra_integral " + sys.extra_integral->name(),
                                            sys.hamiltonian, {*sys.extra_integral}, v.samples,
                                            v.tol, seed_for(7), opts));

  std::vector<std::pair<Observable, Observable>> oracle_pairs{
      {sys.hamiltonian, coordinate_q(1, n)}, {sys.hamiltonian, coordinate_p(n, n)}};
  for (const Observable& f : all) oracle_pairs.emplace_back(sys.hamiltonian, f);
  if (sys.extra_integral) oracle_pairs.emplace_back(sys.hamiltonian, *sys.extra_integral);
  report.checks.push_back(
      check_fd_oracle("fd_oracle", oracle_pairs, v.samples, v.fd_tol, seed_for(8), opts));

  if (n >= 3) {
    std::vector<Observable> quasi = left;
    quasi.push_back(sys.hamiltonian);
    report.ranks.push_back(
        independence_rank("quasi_integrability", quasi, v.samples, seed_for(9), n - 1));
    std::vector<Observable> census = coproduct_integrals(lambda);
    census.push_back(sys.hamiltonian);
    if (sys.extra_integral) census.push_back(*sys.extra_integral);
    const int expected = 2 * n - 4 + (sys.extra_integral ? 1 : 0);
    report.ranks.push_back(independence_rank("superintegrability_census", census, v.samples,
                                             seed_for(10), expected));
  }
  return report;
}

}  // namespace h6

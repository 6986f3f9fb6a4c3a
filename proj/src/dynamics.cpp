#include "h6/dynamics.hpp"

#include <cmath>
#include <ostream>

#include "h6/error.hpp"

namespace h6 {

PhaseVelocity vector_field(const Observable& h, const PhaseState& s) {
  const ValueGradient g = h.evaluate(s);
  const int n = s.dof();
  return PhaseVelocity{g.gradient.tail(n), -g.gradient.head(n)};
}

int steps_for(double t_end, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw Error("time step must be positive");
  if (!(t_end >= 0) || !std::isfinite(t_end)) throw Error("end time must be non-negative");
  return static_cast<int>(std::llround(t_end / dt));
}

namespace {

std::optional<std::string> guard_hit(const Observable& h, const std::vector<Observable>& obs,
                                     const PhaseState& s) {
  if (auto d = h.singularity(s)) return d;
  for (const Observable& o : obs)
    if (auto d = o.singularity(s)) return d;
  return std::nullopt;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

Trajectory integrate(const Observable& h, const PhaseState& s0, double dt, int steps,
                     const std::vector<Observable>& observables) {
  if (!(dt > 0) || !std::isfinite(dt)) throw Error("time step must be positive");
  if (steps < 0) throw Error("step count must be non-negative");
  Trajectory traj;
  traj.dt = dt;
  for (const Observable& o : observables) traj.observable_names.push_back(o.name());

  auto record = [&](double t, const PhaseState& s) {
    std::vector<double> row;
    row.reserve(observables.size());
    for (const Observable& o : observables) row.push_back(o.value(s));
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.values.push_back(std::move(row));
  };
  auto stop = [&](Termination why, std::string msg, int k) {
    traj.termination = why;
    traj.diagnostic = std::move(msg) + " at step " + std::to_string(k);
  };

  if (!s0.finite()) {
    stop(Termination::NonFinite, "non-finite initial state", 0);
    return traj;
  }
  if (auto d = guard_hit(h, observables, s0)) {
    stop(Termination::Singularity, *d, 0);
    return traj;
  }
  PhaseState s = s0;
  try {
    record(0.0, s);
  } catch (const DomainError& e) {
    stop(Termination::DomainError, e.what(), 0);
    return traj;
  } catch (const SingularityError& e) {
    stop(Termination::Singularity, e.what(), 0);
    return traj;
  }

  auto shifted = [&](const PhaseVelocity& v, double c) {
    return PhaseState(s.q + c * v.dq, s.p + c * v.dp);
  };
  for (int k = 1; k <= steps; ++k) {
    try {
      const PhaseVelocity k1 = vector_field(h, s);
      const PhaseVelocity k2 = vector_field(h, shifted(k1, dt / 2));
      const PhaseVelocity k3 = vector_field(h, shifted(k2, dt / 2));
      const PhaseVelocity k4 = vector_field(h, shifted(k3, dt));
      Eigen::VectorXd q = s.q + dt / 6 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
      Eigen::VectorXd p = s.p + dt / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
      PhaseState next(std::move(q), std::move(p));
      if (!next.finite()) {
        stop(Termination::NonFinite, "trajectory blow-up: non-finite state", k);
        return traj;
      }
      if (auto d = guard_hit(h, observables, next)) {
        stop(Termination::Singularity, *d, k);
        return traj;
      }
      s = std::move(next);
      record(k * dt, s);
    } catch (const DomainError& e) {
      stop(Termination::DomainError, e.what(), k);
      return traj;
    } catch (const SingularityError& e) {
      stop(Termination::Singularity, e.what(), k);
      return traj;
    }
  }
  return traj;
}

std::vector<Drift> drift_report(const Trajectory& traj) {
  std::vector<Drift> out;
  for (std::size_t j = 0; j < traj.observable_names.size(); ++j) {
    Drift d;
    d.name = traj.observable_names[j];
    if (!traj.values.empty()) {
      d.initial = traj.values.front()[j];
      const double denom = std::max(1.0, std::abs(d.initial));
      for (const auto& row : traj.values)
        d.max_relative = std::max(d.max_relative, std::abs(row[j] - d.initial) / denom);
    }
    out.push_back(std::move(d));
  }
  return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.states.empty() ? 0 : traj.states.front().dof();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",q" << i;
  for (int i = 1; i <= n; ++i) os << ",p" << i;
  for (const std::string& name : traj.observable_names) os << ',' << csv_field(name);
  os << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(traj.states[k].q[i]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(traj.states[k].p[i]);
    for (double v : traj.values[k]) os << ',' << format_double(v);
    os << '\n';
  }
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::NonFinite: return "non_finite";
    case Termination::Singularity: return "singularity";
    case Termination::DomainError: return "domain_error";
  }
  return "?";
}

}  // namespace h6

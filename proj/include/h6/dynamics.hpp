#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "h6/poisson.hpp"
#include "h6/realization.hpp"

namespace h6 {

struct PhaseVelocity {
  Eigen::VectorXd dq;  // dH/dp
  Eigen::VectorXd dp;  // -dH/dq
};

PhaseVelocity vector_field(const Observable& h, const PhaseState& s);

enum class Termination { Completed, NonFinite, Singularity, DomainError };

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<std::string> observable_names;
  /// values[k][j]: observable j at step k.
  std::vector<std::vector<double>> values;
  Termination termination = Termination::Completed;
  std::string diagnostic;

  bool completed() const { return termination == Termination::Completed; }
  std::size_t size() const { return states.size(); }
};

/// Fixed-step classical RK4. Stops early, keeping the last good state, on a
/// non-finite state, a singularity guard of `h` or an observable, or a domain
/// error while evaluating.
Trajectory integrate(const Observable& h, const PhaseState& s0, double dt, int steps,
                     const std::vector<Observable>& observables);

/// Step count for t_end / dt, rounded to the nearest integer.
int steps_for(double t_end, double dt);

struct Drift {
  std::string name;
  double initial = 0.0;
  /// max_k |F(t_k) - F(t_0)| / max(1, |F(t_0)|).
  double max_relative = 0.0;
};

std::vector<Drift> drift_report(const Trajectory& traj);

/// Header `t,q1..qN,p1..pN,<names>`, round-trip decimal values. Names with
/// commas are quoted.
void write_csv(std::ostream& os, const Trajectory& traj);

std::string_view termination_name(Termination t);

}  // namespace h6

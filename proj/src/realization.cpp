#include "h6/realization.hpp"

#include <string>

namespace h6 {

PhaseState::PhaseState(Eigen::VectorXd q_, Eigen::VectorXd p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size())
    throw Error("phase state: q has " + std::to_string(q.size()) + " entries, p has " +
                std::to_string(p.size()));
  if (q.size() < 1) throw Error("phase state: need at least one degree of freedom");
}

PhaseState::PhaseState(std::initializer_list<double> q_, std::initializer_list<double> p_)
    : PhaseState(Eigen::Map<const Eigen::VectorXd>(q_.begin(), static_cast<Eigen::Index>(q_.size())),
                 Eigen::Map<const Eigen::VectorXd>(p_.begin(), static_cast<Eigen::Index>(p_.size()))) {}

Eigen::VectorXd PhaseState::packed() const {
  Eigen::VectorXd z(2 * q.size());
  z << q, p;
  return z;
}

PhaseState PhaseState::unpack(const Eigen::VectorXd& z) {
  const Eigen::Index n = z.size() / 2;
  return PhaseState(z.head(n), z.tail(n));
}

RealizationParams::RealizationParams(Eigen::VectorXd lambda) : lambda_(std::move(lambda)) {
  if (lambda_.size() < 1) throw Error("realization: need at least one site");
  if (!lambda_.allFinite()) throw Error("realization: lambda must be finite");
  if (!(lambda_.squaredNorm() > 0)) throw Error("realization: sum of lambda_i^2 must be positive");
}

RealizationParams::RealizationParams(std::initializer_list<double> lambda)
    : RealizationParams(Eigen::Map<const Eigen::VectorXd>(lambda.begin(),
                                                          static_cast<Eigen::Index>(lambda.size()))) {}

void check_compatible(const PhaseState& s, const RealizationParams& lambda) {
  if (s.dof() != lambda.dof())
    throw Error("state has " + std::to_string(s.dof()) + " degrees of freedom but realization has " +
                std::to_string(lambda.dof()) + " sites");
}

H6Point realize(const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  return realize_window<double>(s.q, s.p, lambda.lambda(), 0, s.dof());
}

GeneratorFrame realize_with_gradients(const PhaseState& s, const RealizationParams& lambda) {
  check_compatible(s, lambda);
  const int n = s.dof();
  GeneratorFrame f{realize(s, lambda), Eigen::Matrix<double, 6, Eigen::Dynamic>::Zero(6, 2 * n)};
  const auto row = [](Generator g) { return static_cast<int>(g); };
  for (int i = 0; i < n; ++i) {
    const double l = lambda[i];
    f.jacobian(row(Generator::K), i) = s.p[i];
    f.jacobian(row(Generator::K), n + i) = s.q[i];
    f.jacobian(row(Generator::Ap), n + i) = l;
    f.jacobian(row(Generator::Am), i) = l;
    f.jacobian(row(Generator::Bp), n + i) = 2 * s.p[i];
    f.jacobian(row(Generator::Bm), i) = 2 * s.q[i];
  }
  return f;
}

H6Point realize_sites(const PhaseState& s, const RealizationParams& lambda, int a, int b) {
  check_compatible(s, lambda);
  if (a < 1 || b < a || b > s.dof())
    throw Error("site range [" + std::to_string(a) + ", " + std::to_string(b) +
                "] outside 1.." + std::to_string(s.dof()));
  return realize_window<double>(s.q, s.p, lambda.lambda(), a - 1, b);
}

}  // namespace h6

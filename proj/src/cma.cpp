#include "lbpforge/cma.hpp"

#include <cmath>
#include <string>

#include "lbpforge/errors.hpp"

namespace lbpforge {

CmaConstants CmaConstants::defaults(int n) {
  CmaConstants c;
  const double dn = static_cast<double>(n);
  c.target_success = 2.0 / 11.0;
  c.success_rate = 1.0 / 12.0;
  c.damping = 1.0 + dn / 2.0;
  c.covariance_rate = 2.0 / (dn * dn + 6.0);
  c.success_threshold = 0.44;
  return c;
}

CmaState CmaState::initial(Eigen::VectorXd x0, double sigma0) {
  const int n = static_cast<int>(x0.size());
  return initial(std::move(x0), sigma0, CmaConstants::defaults(n));
}

CmaState CmaState::initial(Eigen::VectorXd x0, double sigma0, CmaConstants constants) {
  CmaState s;
  const auto n = x0.size();
  s.parent = std::move(x0);
  s.sigma = sigma0;
  s.chol = Eigen::MatrixXd::Identity(n, n);
  s.constants = constants;
  s.success_prob = constants.target_success;
  s.validate();
  return s;
}

void CmaState::validate() const {
  const auto n = parent.size();
  if (n < 1) throw InvalidArgument("CMA-ES dimension must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("step size must be positive and finite");
  if (chol.rows() != n || chol.cols() != n) throw InvalidArgument("Cholesky factor has the wrong shape");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(chol(i, i) > 0.0)) throw InvalidArgument("Cholesky diagonal must be strictly positive");
  }
  if (!(success_prob >= 0.0 && success_prob <= 1.0)) throw InvalidArgument("success probability outside [0, 1]");
  const auto& c = constants;
  if (!(c.target_success > 0.0 && c.target_success < 1.0)) throw InvalidArgument("p_target must lie in (0, 1)");
  if (!(c.success_rate > 0.0 && c.success_rate <= 1.0)) throw InvalidArgument("c_p must lie in (0, 1]");
  if (!(c.damping > 0.0)) throw InvalidArgument("damping must be > 0");
  if (!(c.covariance_rate > 0.0 && c.covariance_rate < 1.0)) throw InvalidArgument("c_cov must lie in (0, 1)");
}

int gamma_succ(double f_offspring, double f_parent) noexcept { return f_offspring <= f_parent ? 1 : 0; }

CmaSample cma_offspring(const CmaState& state, Eigen::VectorXd z) {
  if (z.size() != state.parent.size()) throw InvalidArgument("z has the wrong dimension");
  CmaSample s;
  const Eigen::VectorXd step = state.chol.triangularView<Eigen::Lower>() * z;
  s.offspring = state.parent + state.sigma * step;
  s.z = std::move(z);
  return s;
}

CmaSample cma_ask(const CmaState& state, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(state.parent.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return cma_offspring(state, std::move(z));
}

Eigen::MatrixXd cholesky_rank_one(const Eigen::MatrixXd& lower, const Eigen::VectorXd& z, double c) {
  const Eigen::Index n = lower.rows();
  Eigen::VectorXd w = lower.triangularView<Eigen::Lower>() * z;
  w *= std::sqrt(c);
  Eigen::MatrixXd out = lower.triangularView<Eigen::Lower>().toDenseMatrix();
  out *= std::sqrt(1.0 - c);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lkk = out(k, k);
    const double r = std::hypot(lkk, w(k));
    if (!(r > 0.0) || !std::isfinite(r) || !(lkk > 0.0)) {
      throw NumericalError("Cholesky update lost positive definiteness at column " + std::to_string(k));
    }
    const double cs = r / lkk;
    const double sn = w(k) / lkk;
    out(k, k) = r;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      out(i, k) = (out(i, k) + sn * w(i)) / cs;
      w(i) = cs * w(i) - sn * out(i, k);
    }
  }
  return out;
}

void cma_tell(CmaState& state, const CmaSample& sample, int gamma) {
  const auto& c = state.constants;
  const double g = gamma != 0 ? 1.0 : 0.0;
  state.success_prob = (1.0 - c.success_rate) * state.success_prob + c.success_rate * g;
  state.sigma *= std::exp((state.success_prob - c.target_success) / (c.damping * (1.0 - c.target_success)));
  if (!(state.sigma > 0.0) || !std::isfinite(state.sigma)) throw NumericalError("step size left (0, inf)");
  if (gamma == 0) return;
  state.parent = sample.offspring;
  if (state.success_prob < c.success_threshold) {
    state.chol = cholesky_rank_one(state.chol, sample.z, c.covariance_rate);
  }
}

CmaRun cma_minimize(const Objective& f, CmaState state, int budget, std::uint64_t seed, const Repair& repair,
                    double stop_at) {
  if (budget < 1) throw InvalidArgument("CMA-ES budget must be >= 1");
  state.validate();
  std::mt19937_64 rng(seed);
  if (repair) repair(state.parent);

  CmaRun run;
  double parent_f = f(state.parent);
  run.evaluations = 1;
  run.best = state.parent;
  run.best_fitness = parent_f;
  run.best_trace.push_back(parent_f);

  while (run.evaluations < budget && run.best_fitness > stop_at) {
    CmaSample s = cma_ask(state, rng);
    if (repair) repair(s.offspring);
    const double fo = f(s.offspring);
    ++run.evaluations;
    const int g = gamma_succ(fo, parent_f);
    cma_tell(state, s, g);
    if (g) parent_f = fo;
    if (fo < run.best_fitness) {
      run.best_fitness = fo;
      run.best = s.offspring;
    }
    run.best_trace.push_back(run.best_fitness);
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace lbpforge

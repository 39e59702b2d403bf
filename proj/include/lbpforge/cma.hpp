#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace lbpforge {

/// Strategy constants of the elitist (1+1) Cholesky CMA-ES.
struct CmaConstants {
  double target_success = 2.0 / 11.0;  // p_target
  double success_rate = 1.0 / 12.0;    // c_p
  double damping = 1.0;                // d
  double covariance_rate = 0.0;        // c_cov
  double success_threshold = 0.44;     // p_thresh

  // d = 1 + n/2, p_target = 2/11, c_p = 1/12, c_cov = 2/(n^2 + 6), p_thresh = 0.44.
  static CmaConstants defaults(int n);
};

/// Parent, step size, lower-triangular Cholesky factor A of the mutation
/// covariance (A A^T), and the smoothed success probability.
struct CmaState {
  Eigen::VectorXd parent;
  double sigma = 1.0;
  Eigen::MatrixXd chol;
  double success_prob = 0.0;
  CmaConstants constants;

  static CmaState initial(Eigen::VectorXd x0, double sigma0);
  static CmaState initial(Eigen::VectorXd x0, double sigma0, CmaConstants constants);

  int dimension() const noexcept { return static_cast<int>(parent.size()); }
  void validate() const;
};

struct CmaSample {
  Eigen::VectorXd offspring;
  Eigen::VectorXd z;  // the standard-normal draw behind `offspring`
};

/// 1 iff f_offspring <= f_parent.
int gamma_succ(double f_offspring, double f_parent) noexcept;

/// parent + sigma * A * z with z ~ N(0, I).
CmaSample cma_ask(const CmaState& state, std::mt19937_64& rng);
CmaSample cma_offspring(const CmaState& state, Eigen::VectorXd z);

/// Success-rule step-size update, parent replacement on success, and the
/// rank-one Cholesky update (rate c_cov, direction A z) while the smoothed
/// success probability is below p_thresh. Throws NumericalError if the factor
/// loses positive definiteness.
void cma_tell(CmaState& state, const CmaSample& sample, int gamma);

/// Lower-triangular L' with L' L'^T = (1 - c) L L^T + c (L z)(L z)^T.
Eigen::MatrixXd cholesky_rank_one(const Eigen::MatrixXd& lower, const Eigen::VectorXd& z, double c);

struct CmaRun {
  Eigen::VectorXd best;
  double best_fitness = 0.0;
  int evaluations = 0;
  std::vector<double> best_trace;  // best fitness after each evaluation
  CmaState final_state;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Repair = std::function<void(Eigen::VectorXd&)>;

/// Minimizes `f` starting from `state.parent`. Spends exactly `budget`
/// evaluations (the first on the start point) unless `stop_at` is reached.
/// `repair`, when set, maps every offspring into the feasible set before it
/// is evaluated.
CmaRun cma_minimize(const Objective& f, CmaState state, int budget, std::uint64_t seed, const Repair& repair = {},
                    double stop_at = -std::numeric_limits<double>::infinity());

}  // namespace lbpforge

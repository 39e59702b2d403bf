#include "lbpforge/search.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <unordered_set>

#include "lbpforge/cma.hpp"
#include "lbpforge/errors.hpp"
#include "lbpforge/parallel.hpp"

namespace lbpforge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t job_seed(std::uint64_t seed, std::size_t index) { return splitmix64(seed ^ splitmix64(index + 1)); }

double to_a(double u) { return std::pow(10.0, u); }

SceneScore run_pass(const Expression& e, double a, const EvaluationContext& ctx, int threads) {
  return score_descriptor(equation_descriptor(e, a, ctx.neighborhood), *ctx.scene, ctx.bgs, threads);
}

struct PoolEntry {
  Expression expression;
  long source;
};

std::vector<PoolEntry> build_pool(const std::vector<Expression>& equations, bool inject) {
  std::vector<PoolEntry> pool;
  if (inject) {
    pool.push_back({parse(kOriginalLbpEquation), -1});
    pool.push_back({parse(kModifiedLbpEquation), -1});
  }
  for (std::size_t i = 0; i < equations.size(); ++i) pool.push_back({equations[i], static_cast<long>(i)});
  return pool;
}

bool is_baseline(const Candidate& c) {
  return c.source < 0 && c.assignment == c.expression.operators() &&
         (c.equation == render(parse(kOriginalLbpEquation)) || c.equation == render(parse(kModifiedLbpEquation)));
}

// A unit of parallel work: one fit_a (exhaustive) or one CMA-ES run over an
// equation's operators and a (cmaes). Jobs are independent and each produces
// candidates in its own evaluation order.
struct Job {
  Expression expression;
  long source = -1;
  OperatorAssignment assignment;
  int budget = 1;
};

std::vector<Candidate> run_exhaustive_job(const Job& job, const EvaluationContext& ctx, const SearchConfig& cfg,
                                          std::uint64_t seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult fit = fit_a(job.expression, ctx, cfg, job.budget, seed, threads);
  Candidate c;
  c.expression = job.expression;
  c.equation = render(job.expression);
  c.source = job.source;
  c.assignment = job.assignment;
  c.a = fit.a;
  c.score = fit.score;
  c.fitness = fit.fitness;
  c.passes = fit.passes;
  c.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {c};
}

std::vector<Candidate> run_cmaes_job(const Job& job, const EvaluationContext& ctx, const SearchConfig& cfg,
                                     std::uint64_t seed, int threads) {
  const auto eta = static_cast<Eigen::Index>(job.expression.operator_count());
  const double lo = std::log10(cfg.a_min);
  const double hi = std::log10(cfg.a_max);
  Eigen::VectorXd x0(eta + 1);
  x0(0) = std::clamp(std::log10(cfg.a_initial), lo, hi);
  const auto ops = job.expression.operators();
  for (Eigen::Index i = 0; i < eta; ++i) x0(i + 1) = ops[static_cast<std::size_t>(i)] + 0.5;

  std::vector<Candidate> found;  // one per distinct equation, first-seen order
  std::map<std::string, std::size_t> index_of;
  std::map<std::pair<std::string, double>, double> memo;
  const bool has_offset = job.expression.contains(LeafKind::OffsetTerm);

  auto objective = [&](const Eigen::VectorXd& x) {
    OperatorAssignment codes(static_cast<std::size_t>(eta));
    for (Eigen::Index i = 0; i < eta; ++i) codes[static_cast<std::size_t>(i)] = decode_operator(x(i + 1));
    const Expression e = job.expression.with_operators(codes);
    const double a = has_offset ? to_a(x(0)) : cfg.a_initial;
    std::string key = render(e);
    if (auto it = memo.find({key, a}); it != memo.end()) return it->second;

    const auto t0 = std::chrono::steady_clock::now();
    const SceneScore s = run_pass(e, a, ctx, threads);
    const double f = fitness(s.score);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    memo[{key, a}] = f;

    auto [it, fresh] = index_of.try_emplace(key, found.size());
    if (fresh) {
      Candidate c;
      c.expression = e;
      c.equation = key;
      c.source = job.source;
      c.assignment = codes;
      c.a = a;
      c.score = s.score;
      c.fitness = f;
      found.push_back(std::move(c));
    }
    Candidate& c = found[it->second];
    ++c.passes;
    c.wall_seconds += secs;
    if (f < c.fitness) {
      c.a = a;
      c.score = s.score;
      c.fitness = f;
    }
    return f;
  };

  CmaState state = CmaState::initial(x0, cfg.cmaes_sigma);
  auto repair = [&](Eigen::VectorXd& x) {
    x(0) = std::clamp(x(0), lo, hi);
    for (Eigen::Index i = 1; i < x.size(); ++i) x(i) = std::clamp(x(i), 0.0, std::nextafter(4.0, 0.0));
  };
  cma_minimize(objective, std::move(state), job.budget, seed, repair);
  return found;
}

}  // namespace

std::uint8_t decode_operator(double o) noexcept {
  if (!(o > 0.0)) return 0;
  if (o >= 4.0) return 3;
  return static_cast<std::uint8_t>(std::floor(o));
}

void SearchConfig::validate() const {
  if (mutation_cap < 1) throw InvalidArgument("mutation cap must be >= 1");
  if (!(a_min > 0.0) || !(a_max > a_min)) throw InvalidArgument("a bounds must be positive with a_min < a_max");
  if (!(a_initial > 0.0)) throw InvalidArgument("initial a must be positive");
  if (!(a_sigma > 0.0) || !(cmaes_sigma > 0.0)) throw InvalidArgument("initial step sizes must be positive");
  if (a_budget < 1 || cmaes_budget < 1) throw InvalidArgument("per-candidate budgets must be >= 1");
  if (candidate_budget < 0) throw InvalidArgument("candidate budget must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
}

FitResult fit_a(const Expression& e, const EvaluationContext& ctx, const SearchConfig& cfg, int budget,
                std::uint64_t seed, int threads) {
  if (ctx.scene == nullptr) throw InvalidArgument("evaluation context has no scene");
  if (budget < 1) throw InvalidArgument("fit_a budget must be >= 1");
  cfg.validate();
  const double lo = std::log10(cfg.a_min);
  const double hi = std::log10(cfg.a_max);
  const double u0 = std::clamp(std::log10(cfg.a_initial), lo, hi);

  FitResult out;
  if (!e.contains(LeafKind::OffsetTerm) || budget == 1) {
    const double a = e.contains(LeafKind::OffsetTerm) ? to_a(u0) : cfg.a_initial;
    const SceneScore s = run_pass(e, a, ctx, threads);
    out.a = a;
    out.score = s.score;
    out.fitness = fitness(s.score);
    out.passes = 1;
    return out;
  }

  bool have = false;
  auto objective = [&](const Eigen::VectorXd& u) {
    const double a = to_a(u(0));
    const SceneScore s = run_pass(e, a, ctx, threads);
    const double f = fitness(s.score);
    ++out.passes;
    if (!have || f < out.fitness) {
      have = true;
      out.a = a;
      out.score = s.score;
      out.fitness = f;
    }
    return f;
  };
  Eigen::VectorXd x0(1);
  x0(0) = u0;
  auto repair = [&](Eigen::VectorXd& u) { u(0) = std::clamp(u(0), lo, hi); };
  cma_minimize(objective, CmaState::initial(x0, cfg.a_sigma), budget, seed, repair);
  return out;
}

DiscoveryResult discover(const std::vector<Expression>& equations, const EvaluationContext& ctx,
                         const SearchConfig& cfg) {
  if (equations.empty()) throw EmptyInput("discover needs at least one equation");
  if (ctx.scene == nullptr) throw InvalidArgument("evaluation context has no scene");
  cfg.validate();
  ctx.scene->validate();

  const auto pool = build_pool(equations, cfg.inject_baselines);
  std::vector<Job> jobs;
  std::unordered_set<std::string> seen;
  auto cost = [&](const Expression& e) {
    if (cfg.mode == SearchMode::Cmaes) return cfg.cmaes_budget;
    return e.contains(LeafKind::OffsetTerm) ? cfg.a_budget : 1;
  };

  if (cfg.mode == SearchMode::Exhaustive) {
    // Identity baselines lead so their scores are known after the first batch.
    std::vector<Job> rest;
    for (const auto& entry : pool) {
      const auto identity = entry.expression.operators();
      for (const auto& codes : enumerate_assignments(identity, cfg.mutation_cap)) {
        Expression m = entry.expression.with_operators(codes);
        if (!seen.insert(render(m)).second) continue;
        Job job{m, entry.source, codes, cost(m)};
        if (entry.source < 0 && codes == identity) {
          jobs.push_back(std::move(job));
        } else {
          rest.push_back(std::move(job));
        }
      }
    }
    jobs.insert(jobs.end(), rest.begin(), rest.end());
  } else {
    for (const auto& entry : pool) {
      jobs.push_back({entry.expression, entry.source, entry.expression.operators(), cost(entry.expression)});
    }
  }

  DiscoveryResult result;
  if (cfg.candidate_budget > 0) {
    std::vector<Job> kept;
    long used = 0;
    for (auto& job : jobs) {
      const long remaining = cfg.candidate_budget - used;
      if (remaining <= 0) break;
      if (cfg.mode == SearchMode::Exhaustive) {
        if (job.budget > remaining) break;
      } else {
        job.budget = static_cast<int>(std::min<long>(job.budget, remaining));
      }
      used += job.budget;
      kept.push_back(std::move(job));
    }
    jobs = std::move(kept);
  }
  if (jobs.empty()) throw InvalidArgument("candidate budget is too small for a single evaluation");
  for (const auto& job : jobs) result.budget_passes += job.budget;

  const int workers = resolve_workers(cfg.workers);
  const int inner = workers > 1 ? 1 : default_workers();
  std::vector<std::vector<Candidate>> produced(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::size_t done = 0;
  double baseline = 1.0;
  bool baseline_known = false;

  for (std::size_t begin = 0; begin < jobs.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(jobs.size(), begin + cfg.batch_size);
    const auto n = static_cast<long>(end - begin);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
    for (long j = 0; j < n; ++j) {
      const std::size_t idx = begin + static_cast<std::size_t>(j);
      try {
        const std::uint64_t seed = job_seed(cfg.seed, idx);
        produced[idx] = cfg.mode == SearchMode::Exhaustive ? run_exhaustive_job(jobs[idx], ctx, cfg, seed, inner)
                                                           : run_cmaes_job(jobs[idx], ctx, cfg, seed, inner);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (errors[idx]) std::rethrow_exception(errors[idx]);
    }
    done = end;

    if (!cfg.early_stop) continue;
    bool beaten = false;
    for (std::size_t idx = 0; idx < done; ++idx) {
      for (const auto& c : produced[idx]) {
        if (is_baseline(c)) {
          baseline = baseline_known ? std::min(baseline, c.fitness) : c.fitness;
          baseline_known = true;
        }
      }
    }
    if (!baseline_known) continue;
    for (std::size_t idx = 0; idx < done && !beaten; ++idx) {
      for (const auto& c : produced[idx]) {
        if (!is_baseline(c) && c.fitness < baseline) beaten = true;
      }
    }
    if (beaten && done < jobs.size()) {
      result.stopped_early = true;
      break;
    }
  }

  std::vector<Candidate> timeline;
  std::map<std::string, std::size_t> by_equation;
  for (std::size_t idx = 0; idx < done; ++idx) {
    for (auto& c : produced[idx]) {
      result.total_passes += c.passes;
      c.order = static_cast<long>(timeline.size());
      const double prev = result.best_trace.empty() ? c.fitness : result.best_trace.back();
      result.best_trace.push_back(std::min(prev, c.fitness));
      if (is_baseline(c)) {
        result.baseline_fitness = baseline_known ? std::min(result.baseline_fitness, c.fitness) : c.fitness;
        baseline_known = true;
      }
      auto [it, fresh] = by_equation.try_emplace(c.equation, timeline.size());
      if (fresh) {
        timeline.push_back(std::move(c));
      } else {
        Candidate& kept = timeline[it->second];
        kept.passes += c.passes;
        if (c.fitness < kept.fitness) {
          kept.a = c.a;
          kept.score = c.score;
          kept.fitness = c.fitness;
        }
      }
    }
  }

  result.ranked = std::move(timeline);
  std::stable_sort(result.ranked.begin(), result.ranked.end(), [](const Candidate& x, const Candidate& y) {
    if (x.fitness != y.fitness) return x.fitness < y.fitness;
    if (x.equation != y.equation) return x.equation < y.equation;
    return x.a < y.a;
  });
  return result;
}

}  // namespace lbpforge

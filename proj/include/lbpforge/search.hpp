#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lbpforge/bgs.hpp"
#include "lbpforge/expr.hpp"
#include "lbpforge/lbp.hpp"
#include "lbpforge/metrics.hpp"
#include "lbpforge/scene.hpp"

namespace lbpforge {

enum class SearchMode { Exhaustive, Cmaes };

struct SearchConfig {
  SearchMode mode = SearchMode::Exhaustive;
  std::size_t mutation_cap = 1024;     // per input equation
  double a_min = 1e-2;
  double a_max = 1e2;
  double a_initial = 1.0;
  double a_sigma = 0.5;                // initial step in log10(a)
  int a_budget = 8;                    // BGS passes per candidate when fitting a
  int cmaes_budget = 64;               // objective evaluations per equation (cmaes mode)
  double cmaes_sigma = 1.0;
  long candidate_budget = 0;           // total BGS passes, 0 = unlimited
  std::uint64_t seed = 0;
  int workers = 0;                     // 0 = default_workers()
  bool inject_baselines = true;
  bool early_stop = false;             // stop after the first batch that beats the baselines
  std::size_t batch_size = 32;

  void validate() const;
};

/// Everything needed to score one descriptor on one scene.
struct EvaluationContext {
  const Scene* scene = nullptr;
  BgsParams bgs;
  NeighborhoodSpec neighborhood;
};

struct FitResult {
  double a = 1.0;
  Score score;
  double fitness = 1.0;
  int passes = 0;
};

/// Searches log10(a) in [log10 a_min, log10 a_max] with a 1-D (1+1)-CMA-ES,
/// spending at most `budget` BGS passes. Equations without an `a` leaf are
/// scored once at a_initial.
FitResult fit_a(const Expression& e, const EvaluationContext& ctx, const SearchConfig& cfg, int budget,
                std::uint64_t seed, int threads = 1);

struct Candidate {
  Expression expression = parse("g_p - g_c");
  std::string equation;       // canonical render
  long source = -1;           // index into the input list; -1 for an injected baseline
  OperatorAssignment assignment;
  double a = 1.0;
  Score score;
  double fitness = 1.0;
  int passes = 0;
  long order = 0;             // position in the evaluation timeline
  double wall_seconds = 0.0;
};

struct DiscoveryResult {
  std::vector<Candidate> ranked;     // fitness ascending, then equation text, then a
  std::vector<double> best_trace;    // best fitness so far, in evaluation order
  long total_passes = 0;
  long budget_passes = 0;            // passes reserved up front
  bool stopped_early = false;
  double baseline_fitness = 1.0;

  const Candidate& best() const { return ranked.front(); }
};

inline const char* kOriginalLbpEquation = "g_p - g_c";
inline const char* kModifiedLbpEquation = "(g_p - g_c) + a";

/// Operator-mutation search over `equations`; returns every evaluated
/// candidate ranked by fitness (1 - F). Throws EmptyInput on an empty list.
DiscoveryResult discover(const std::vector<Expression>& equations, const EvaluationContext& ctx,
                         const SearchConfig& cfg);

/// Maps o in R to an operator code: clamp to [0, 4) and floor.
std::uint8_t decode_operator(double o) noexcept;

}  // namespace lbpforge

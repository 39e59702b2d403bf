#include "lbpforge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lbpforge/errors.hpp"

namespace lbpforge {

namespace {

bool all_nonnegative(const std::array<double, 4>& w) {
  return std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
}

bool any_positive(const std::array<double, 4>& w) {
  return std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
}

class TreeDrawer {
 public:
  TreeDrawer(const GrammarSamplerConfig& cfg, std::mt19937_64& rng)
      : cfg_(cfg),
        rng_(rng),
        ops_(cfg.operator_weights.begin(), cfg.operator_weights.end()),
        leaves_(cfg.leaf_weights.begin(), cfg.leaf_weights.end()) {}

  Expression draw() { return node(0); }

 private:
  Expression node(int depth) {
    const bool expand = depth == 0 || (depth < cfg_.max_depth && coin_(rng_) < cfg_.expand_probability);
    if (!expand) return leaf();
    const auto op = static_cast<Op>(ops_(rng_));
    Expression lhs = node(depth + 1);
    Expression rhs = node(depth + 1);
    return Expression::binary(op, std::move(lhs), std::move(rhs));
  }

  Expression leaf() {
    switch (leaves_(rng_)) {
      case 0: return Expression::neighbor();
      case 1: return Expression::center();
      case 2: return Expression::offset();
      default: return Expression::constant(static_cast<double>(digit_(rng_)));
    }
  }

  const GrammarSamplerConfig& cfg_;
  std::mt19937_64& rng_;
  std::discrete_distribution<int> ops_;
  std::discrete_distribution<int> leaves_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
  std::uniform_int_distribution<int> digit_{1, 9};
};

}  // namespace

void GrammarSamplerConfig::validate() const {
  if (max_depth < 1) throw InvalidArgument("sampler max_depth must be >= 1");
  if (!(expand_probability >= 0.0 && expand_probability <= 1.0)) {
    throw InvalidArgument("sampler expand_probability must lie in [0, 1]");
  }
  if (!all_nonnegative(operator_weights) || !any_positive(operator_weights)) {
    throw InvalidArgument("operator weights must be nonnegative and not all zero");
  }
  if (!all_nonnegative(leaf_weights) || !any_positive(leaf_weights)) {
    throw InvalidArgument("leaf weights must be nonnegative and not all zero");
  }
  if (leaf_weights[0] <= 0.0 || leaf_weights[1] <= 0.0) {
    throw InvalidArgument("g_p and g_c leaf weights must be positive");
  }
}

std::vector<Expression> grammar_sample(const GrammarSamplerConfig& cfg,
                                       const std::unordered_set<std::string>& exclude) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  TreeDrawer drawer(cfg, rng);

  std::vector<Expression> out;
  out.reserve(cfg.count);
  std::unordered_set<std::string> seen;
  const std::size_t max_draws = 10 * cfg.count * 100;
  for (std::size_t draws = 0; out.size() < cfg.count; ++draws) {
    if (draws >= max_draws) {
      throw ExhaustionError("found only " + std::to_string(out.size()) + " of " + std::to_string(cfg.count) +
                            " distinct equations in " + std::to_string(max_draws) + " draws");
    }
    Expression e = drawer.draw();
    if (!e.contains(LeafKind::NeighborGray) || !e.contains(LeafKind::CenterGray)) continue;
    std::string key = render(e);
    if (exclude.contains(key) || !seen.insert(std::move(key)).second) continue;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace lbpforge

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "lbpforge/expr.hpp"

namespace lbpforge {

/// Random expression-tree generator used to build equation corpora when no
/// learned generator output is available.
struct GrammarSamplerConfig {
  int max_depth = 3;               // operator levels; the root is always an operator
  double expand_probability = 0.5; // chance a non-root node below max_depth is an operator
  std::array<double, 4> operator_weights{1.0, 1.0, 1.0, 1.0};  // + - * /
  std::array<double, 4> leaf_weights{1.0, 1.0, 0.5, 0.0};      // g_p g_c a constant
  std::uint64_t seed = 0;
  std::size_t count = 1;

  void validate() const;
};

/// Draws `cfg.count` distinct expressions, none of whose canonical renders
/// is in `exclude`, each containing g_p and g_c. Throws ExhaustionError after
/// 10 * count * 100 draws.
std::vector<Expression> grammar_sample(const GrammarSamplerConfig& cfg,
                                       const std::unordered_set<std::string>& exclude = {});

}  // namespace lbpforge

#pragma once

#include <string>
#include <vector>

#include "satisrank/divergence.hpp"
#include "satisrank/ranking.hpp"
#include "satisrank/risk_core.hpp"

namespace satisrank {

struct BatchOptions {
  double epsilon = 1e-4;           // bisection stops at this interval width
  double feasibility_slack = 1e-9;
  /// Constraint right-hand side, in target-embedded units. 0 is the plain
  /// constraint; negative values tighten it (the shrunken-target candidate).
  double threshold = 0.0;
  /// Compare against the item's target instead of `threshold` (target
  /// counted twice, kept for comparison runs).
  bool threshold_is_target = false;
  RiskOptions risk;
};

struct BatchSolution {
  std::string item_id;
  double alpha_star = 1.0;
  double index = 0.0;  // 1 - alpha_star
  double eta_star = 0.0;
  bool feasible_at_alpha_star = false;
  int bisection_steps = 0;
  int failed_probes = 0;  // probes whose inner problem had no finite value
  RegretScaling scaling = RegretScaling::InverseAlpha;
  DivergenceSpec spec;
};

/// Bisection over alpha on the SAA satisficing problem. Under 1/alpha the
/// feasible set grows with alpha and the smallest feasible alpha is
/// returned; under 1/(1 - alpha) it shrinks with alpha and the largest
/// feasible alpha is returned.
BatchSolution satisficing_binary_search(const ItemBatch& batch, const DivergenceSpec& spec,
                                        RegretScaling scaling, const BatchOptions& opts = {});

/// Inner constraint value g_N(alpha) (target embedded) used by the bisection.
double constraint_value(const ItemBatch& batch, double alpha, const DivergenceSpec& spec,
                        RegretScaling scaling, const RiskOptions& opts = {});

/// CVaR satisficing index through the single concave problem
/// sup_{t > 0} mean_n min{-t (d_n - tau), 1}, clipped at 0.
double cvar_satisficing_direct(const ItemBatch& batch);

struct BatchRanking {
  RankingReport report;
  std::vector<BatchSolution> solutions;  // in input order
};

/// Solves every item and ranks by descending index.
/// Throws ArgumentError on an empty list or duplicate ids.
BatchRanking rank_batch(const std::vector<ItemBatch>& items, const DivergenceSpec& spec,
                        RegretScaling scaling, const BatchOptions& opts = {});

}  // namespace satisrank

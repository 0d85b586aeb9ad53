#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satisrank/batch_solver.hpp"
#include "satisrank/divergence.hpp"
#include "satisrank/risk_core.hpp"

namespace satisrank {

double normal_cdf(double z);

/// z with normal_cdf(z) = p, by bisection to 1e-10. p must lie in (0, 1).
double normal_quantile(double p);

/// Constants of the sample-size and ranking-validity calculators. They are
/// supplied by the user, never estimated from data.
struct BoundParams {
  double sigma2 = 0.0;        // variance envelope
  double psi_bar = 0.0;       // E[psi(X)]
  double phi_bar = 0.0;       // E[phi(X)]
  double diameter = 0.0;      // D_E
  double lipschitz_pi = 0.0;  // C, uniform bound on the multiplier
  double tau_gap = 0.0;       // eps0
  double gap_c = 0.0;         // c, smallest separation between items
  double big_m = 0.0;         // M, bound on the group values
  double beta = 0.05;
  double gamma = 0.05;
  double delta = 0.05;
  double epsilon = 0.0;
  int m_groups = 10;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// Reads `key = value` lines (blank lines and `#` comments allowed).
/// Unknown keys and unparsable values raise ParseError.
BoundParams parse_bound_params(std::string_view text);

/// Which side of the optimal index a bound sits on.
enum class BoundSide { Lower, Upper };
std::string_view side_name(BoundSide side);

/// Converts a value of the satisficing objective (1 - alpha, or alpha under
/// 1/(1 - alpha)) to index units.
double objective_to_index(RegretScaling scaling, double value);

struct LagrangianSolution {
  double alpha = 0.0;
  double value = 0.0;
};

/// max over the alpha box of objective(alpha) + pi * g_N(alpha).
/// Points where g_N has no finite value are skipped; SolverError when none has.
LagrangianSolution solve_lagrangian(const ItemBatch& batch, double pi_tilde,
                                    const DivergenceSpec& spec, RegretScaling scaling,
                                    const RiskOptions& opts = {}, bool literal_sup = false);

/// Multiplier read off the stationarity condition at alpha_star. Never
/// positive, and 0 when alpha_star sits on the box edge.
double estimate_multiplier(const ItemBatch& batch, double alpha_star, const DivergenceSpec& spec,
                           RegretScaling scaling, const RiskOptions& opts = {});

struct UpperBoundReport {
  double alpha_tilde = 0.0;
  double q_tilde = 0.0;
  double s_q = 0.0;
  double z_delta = 0.0;
  bool accepted = false;
  double confidence = 0.95;  // 1 - delta
  double bound = 0.0;        // 1 - alpha_tilde
  BoundSide side = BoundSide::Upper;
  double threshold = 0.0;    // shrunken right-hand side used for the candidate
  int rounds = 0;
};

/// accepted iff (0 - q) / s >= z_{1-delta}; with s = 0, iff q <= 0.
bool upper_bound_decision(double q_tilde, double s_q, double delta);

/// Checks candidate alpha_tilde on an independent resample of at least 30
/// observations.
UpperBoundReport upper_bound_check(double alpha_tilde, const ItemBatch& resample,
                                   const DivergenceSpec& spec, RegretScaling scaling,
                                   double delta, const RiskOptions& opts = {},
                                   bool literal_sup = false);

struct LowerBoundReport {
  double l_tilde = 0.0;
  double s_l = 0.0;
  double z = 0.0;      // z_{gamma/2}
  double bound = 0.0;  // l_tilde - z s_l on the lower side, + on the upper
  double confidence = 0.95;
  BoundSide side = BoundSide::Lower;
  std::vector<double> group_values;  // in index units
};

/// Mean and standard error of group values, l_tilde -/+ z_{gamma/2} S.
/// With big_m the values are clipped to [0, big_m] first.
LowerBoundReport lower_bound_from_values(std::vector<double> values, double gamma,
                                         BoundSide side = BoundSide::Lower,
                                         std::optional<double> big_m = std::nullopt);

/// Lagrangian bound from independent groups at a fixed multiplier.
LowerBoundReport lower_bound_estimate(const std::vector<ItemBatch>& groups, double pi_tilde,
                                      const DivergenceSpec& spec, RegretScaling scaling,
                                      double gamma, const RiskOptions& opts = {},
                                      bool literal_sup = false,
                                      std::optional<double> big_m = std::nullopt);

/// Side on which the validated candidate 1 - alpha_tilde bounds the index.
BoundSide candidate_side(RegretScaling scaling);
/// Side on which the Lagrangian group estimate bounds the index.
BoundSide lagrangian_side(RegretScaling scaling);

struct SampleSizeResult {
  std::int64_t n = 0;
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double raw = 0.0;  // before rounding up
};

/// InfeasibleParameters when c - epsilon - z_{gamma/2} M^2/4 <= 0.
SampleSizeResult required_sample_size(const BoundParams& params);

/// Probability that I items keep their ranking given N1 candidate and N2
/// per-group observations.
double ranking_validity_probability(std::int64_t n1, std::int64_t n2, int items,
                                    const BoundParams& params);

struct ValidationOptions {
  double delta = 0.05;
  double gamma = 0.05;
  int max_shrink_rounds = 20;
  bool literal_sup = false;
  std::optional<double> big_m;
  BatchOptions batch;
};

struct ItemValidation {
  std::string item_id;
  BatchSolution saa;
  double pi_tilde = 0.0;
  UpperBoundReport candidate;
  LowerBoundReport lagrangian;
  double lower = 0.0;  // index-unit bounds assembled from both reports
  double upper = 0.0;
  double relative_gap = 0.0;  // (upper - lower) / |upper|
};

/// Solves the SAA problem on `main`, validates a candidate against
/// `resample` (tightening the threshold on rejection) and bounds the
/// optimum from `groups`.
ItemValidation validate_item(const ItemBatch& main, const ItemBatch& resample,
                             const std::vector<ItemBatch>& groups, const DivergenceSpec& spec,
                             RegretScaling scaling, const ValidationOptions& opts = {});

/// Splits a batch into `groups` disjoint consecutive groups of equal size;
/// leftover observations are dropped.
std::vector<ItemBatch> partition_groups(const ItemBatch& batch, int groups);

}  // namespace satisrank

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace satisrank {

struct RankedEntry {
  std::string item_id;
  double index = 0.0;
  int rank = 0;
};

/// Items ordered by descending index with competition ranks (ties share the
/// smaller rank).
struct RankingReport {
  std::vector<RankedEntry> entries;
  std::vector<std::vector<std::string>> ties;  // groups of size >= 2
  std::optional<std::vector<std::string>> reference;
  std::optional<std::int64_t> inversion_loss;
  std::optional<double> validity;
};

using Score = std::pair<std::string, double>;

inline constexpr double kTieTolerance = 1e-9;

/// Sorts descending by index, id-lexicographic inside ties.
/// Throws ArgumentError on duplicate ids.
RankingReport rank_items(const std::vector<Score>& scores);

/// Number of unordered pairs {i, j} ordered oppositely by the two score
/// vectors. Pairs tied in `estimated` do not count. `truth` must be tie-free
/// and carry the same id set.
std::int64_t inversion_loss(const std::vector<Score>& estimated, const std::vector<Score>& truth);

/// exp(-exp(-(x - location) / scale)).
double gumbel_cdf(double x, double location, double scale);

/// P(Binomial(n, p) <= e). Exactly 1 when e >= n.
double binomial_cdf(std::int64_t n, std::int64_t e, double p);

/// P(E <= e) for the inversion count E of `items` items after `iters`
/// iterations: each of the C(items, 2) pairs inverts independently with
/// p_inv = 1 - F_gumbel(gap_c; kappa_prime / iters, 1).
/// With `literal_orientation` the success/failure roles of p_inv are swapped.
double loss_bound_probability(int items, std::int64_t e, double gap_c, double kappa_prime,
                              std::int64_t iters, bool literal_orientation = false);

/// Pair-inversion probability used by loss_bound_probability.
double pair_inversion_probability(double gap_c, double kappa_prime, std::int64_t iters);

}  // namespace satisrank

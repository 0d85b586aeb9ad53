#include "satisrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "satisrank/error.hpp"

namespace satisrank {

RankingReport rank_items(const std::vector<Score>& scores) {
  std::set<std::string> ids;
  for (const auto& [id, value] : scores) {
    if (!ids.insert(id).second) throw ArgumentError("ranking", "duplicate item_id '" + id + "'");
    if (std::isnan(value)) throw ArgumentError("ranking", "index of '" + id + "' is NaN");
  }
  std::vector<Score> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const Score& a, const Score& b) {
    if (std::abs(a.second - b.second) > kTieTolerance) return a.second > b.second;
    return a.first < b.first;
  });

  RankingReport report;
  report.entries.reserve(sorted.size());
  std::vector<std::string> group;
  double group_head = 0.0;
  int group_rank = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& [id, value] = sorted[i];
    // Ties chain from the first member of the group, so a long run of
    // near-equal values does not drift.
    if (i == 0 || std::abs(group_head - value) > kTieTolerance) {
      if (group.size() >= 2) report.ties.push_back(group);
      group.clear();
      group_head = value;
      group_rank = static_cast<int>(i) + 1;
    }
    group.push_back(id);
    report.entries.push_back({id, value, group_rank});
  }
  if (group.size() >= 2) report.ties.push_back(group);
  return report;
}

std::int64_t inversion_loss(const std::vector<Score>& estimated, const std::vector<Score>& truth) {
  std::map<std::string, double> est;
  for (const auto& [id, v] : estimated) {
    if (!est.emplace(id, v).second) throw ArgumentError("ranking", "duplicate id '" + id + "'");
  }
  std::map<std::string, double> tru;
  for (const auto& [id, v] : truth) {
    if (!tru.emplace(id, v).second) throw ArgumentError("ranking", "duplicate id '" + id + "'");
  }
  if (est.size() != tru.size() ||
      !std::equal(est.begin(), est.end(), tru.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw ArgumentError("ranking", "estimated and truth rankings cover different items");
  }
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(est.size());
  for (const auto& [id, v] : est) pairs.emplace_back(v, tru.at(id));

  std::int64_t loss = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const double dt = pairs[i].second - pairs[j].second;
      if (dt == 0.0) throw ArgumentError("ranking", "truth ranking contains ties");
      if ((pairs[i].first - pairs[j].first) * dt < 0.0) ++loss;
    }
  }
  return loss;
}

double gumbel_cdf(double x, double location, double scale) {
  if (!(scale > 0.0)) throw ArgumentError("ranking", "gumbel scale must be positive");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return std::exp(-std::exp(-(x - location) / scale));
}

double binomial_cdf(std::int64_t n, std::int64_t e, double p) {
  if (n < 0) throw ArgumentError("ranking", "binomial n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("ranking", "binomial p must lie in [0,1]");
  if (e < 0) return 0.0;
  if (e >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;

  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  // Below the mean the lower tail is the small one and is summed directly;
  // above it, 1 - upper tail keeps the cancellation harmless.
  const bool lower_tail = static_cast<double>(e) < static_cast<double>(n) * p;
  const std::int64_t from = lower_tail ? 0 : e + 1;
  const std::int64_t to = lower_tail ? e : n;
  long double sum = 0.0L;
  for (std::int64_t i = from; i <= to; ++i) {
    const long double log_choose = std::lgamma(static_cast<long double>(n) + 1) -
                                   std::lgamma(static_cast<long double>(i) + 1) -
                                   std::lgamma(static_cast<long double>(n - i) + 1);
    sum += std::exp(log_choose + static_cast<long double>(i) * lp +
                    static_cast<long double>(n - i) * lq);
  }
  const long double cdf = lower_tail ? sum : 1.0L - sum;
  return static_cast<double>(std::clamp(cdf, 0.0L, 1.0L));
}

double pair_inversion_probability(double gap_c, double kappa_prime, std::int64_t iters) {
  if (!(gap_c > 0.0)) throw ArgumentError("ranking", "gap_c must be positive");
  if (iters < 1) throw ArgumentError("ranking", "iters must be at least 1");
  if (!(kappa_prime >= 0.0)) throw ArgumentError("ranking", "kappa_prime must be nonnegative");
  return 1.0 - gumbel_cdf(gap_c, kappa_prime / static_cast<double>(iters), 1.0);
}

double loss_bound_probability(int items, std::int64_t e, double gap_c, double kappa_prime,
                              std::int64_t iters, bool literal_orientation) {
  if (items < 2) throw ArgumentError("ranking", "need at least two items");
  const std::int64_t n = static_cast<std::int64_t>(items) * (items - 1) / 2;
  if (e < 0 || e > n) {
    std::ostringstream os;
    os << "e = " << e << " outside [0, " << n << "]";
    throw ArgumentError("ranking", os.str());
  }
  const double p_inv = pair_inversion_probability(gap_c, kappa_prime, iters);
  return binomial_cdf(n, e, literal_orientation ? 1.0 - p_inv : p_inv);
}

}  // namespace satisrank

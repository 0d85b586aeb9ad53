#include "satisrank/batch_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "satisrank/error.hpp"
#include "satisrank/golden_section.hpp"
#include "satisrank/parallel.hpp"

namespace satisrank {

double constraint_value(const ItemBatch& batch, double alpha, const DivergenceSpec& spec,
                        RegretScaling scaling, const RiskOptions& opts) {
  return empirical_oce_risk(batch, alpha, spec, scaling, opts).value;
}

BatchSolution satisficing_binary_search(const ItemBatch& batch, const DivergenceSpec& spec,
                                        RegretScaling scaling, const BatchOptions& opts) {
  batch.validate();
  spec.validate();
  if (!(opts.epsilon > 0.0)) throw ArgumentError("batch_solver", "epsilon must be positive");

  const double threshold = opts.threshold_is_target ? batch.target : opts.threshold;
  const Interval box = alpha_box(scaling, opts.risk.alpha_min);

  BatchSolution sol;
  sol.item_id = batch.item_id;
  sol.scaling = scaling;
  sol.spec = spec;

  int probes = 0;
  struct Probe {
    bool feasible;
    double eta;
  };
  auto probe = [&](double alpha) -> Probe {
    ++probes;
    try {
      const InnerSolveResult r = empirical_oce_risk(batch, alpha, spec, scaling, opts.risk);
      return {r.value <= threshold + opts.feasibility_slack, r.eta_star};
    } catch (const InfeasibleEvaluation&) {
      ++sol.failed_probes;
      return {false, 0.0};
    }
  };

  auto finish = [&](double alpha, const Probe& p) {
    sol.alpha_star = alpha;
    sol.index = index_from_alpha(alpha);
    sol.eta_star = p.eta;
    sol.feasible_at_alpha_star = p.feasible;
    if (sol.failed_probes == probes) {
      std::ostringstream os;
      os << "inner problem infeasible at every probe for item '" << batch.item_id << "' ("
         << probes << " probes, kind " << kind_name(spec.kind) << ")";
      throw SolverError("batch_solver", os.str());
    }
    return sol;
  };

  // The "loose" end is where the constraint is easiest to meet.
  const bool grows = scaling == RegretScaling::InverseAlpha;
  const double loose = grows ? box.upper : box.lower;
  const double tight = grows ? box.lower : box.upper;

  const Probe at_loose = probe(loose);
  if (!at_loose.feasible) return finish(loose, at_loose);
  const Probe at_tight = probe(tight);
  if (at_tight.feasible) return finish(tight, at_tight);

  double feasible_end = loose;
  Probe feasible_probe = at_loose;
  double infeasible_end = tight;
  while (std::abs(feasible_end - infeasible_end) > opts.epsilon) {
    const double mid = 0.5 * (feasible_end + infeasible_end);
    const Probe p = probe(mid);
    ++sol.bisection_steps;
    if (p.feasible) {
      feasible_end = mid;
      feasible_probe = p;
    } else {
      infeasible_end = mid;
    }
  }
  return finish(feasible_end, feasible_probe);
}

double cvar_satisficing_direct(const ItemBatch& batch) {
  batch.validate();
  std::vector<double> x;
  x.reserve(batch.samples.size());
  double smallest_loss_gap = kInfinity;
  for (double d : batch.samples) {
    x.push_back(d - batch.target);
    if (x.back() < 0.0) smallest_loss_gap = std::min(smallest_loss_gap, -x.back());
  }
  // Past the last breakpoint t = 1/|x_n| the objective is nonincreasing.
  const double t_hi =
      std::isfinite(smallest_loss_gap) ? std::max(1.0, 2.0 / smallest_loss_gap) : 1.0;

  auto negated = [&](double t) {
    double sum = 0.0;
    for (double v : x) sum += std::min(-t * v, 1.0);
    return -sum / static_cast<double>(x.size());
  };
  const GoldenResult r =
      golden_section_minimize(negated, kAlphaMin, t_hi, GoldenOptions{1e-8 * t_hi, 400});
  double best = -r.value;
  best = std::max({best, -negated(kAlphaMin), -negated(t_hi)});
  return std::max(best, 0.0);
}

BatchRanking rank_batch(const std::vector<ItemBatch>& items, const DivergenceSpec& spec,
                        RegretScaling scaling, const BatchOptions& opts) {
  if (items.empty()) throw ArgumentError("batch_solver", "rank_batch needs at least one item");
  std::set<std::string> seen;
  for (const auto& it : items) {
    if (!seen.insert(it.item_id).second) {
      throw ArgumentError("batch_solver", "duplicate item_id '" + it.item_id + "'");
    }
  }
  BatchRanking out;
  out.solutions.resize(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    out.solutions[i] = satisficing_binary_search(items[i], spec, scaling, opts);
  });
  std::vector<Score> scores;
  scores.reserve(items.size());
  for (const auto& s : out.solutions) scores.emplace_back(s.item_id, s.index);
  out.report = rank_items(scores);
  return out;
}

}  // namespace satisrank

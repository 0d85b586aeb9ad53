#include "satisrank/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "satisrank/error.hpp"
#include "satisrank/golden_section.hpp"
#include "satisrank/parallel.hpp"

namespace satisrank {
namespace {

constexpr int kLagrangianGrid = 64;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double inner_value(const ItemBatch& batch, double alpha, const DivergenceSpec& spec,
                   RegretScaling scaling, const RiskOptions& opts, bool literal_sup) {
  return literal_sup ? empirical_oce_sup(batch, alpha, spec, scaling, opts).value
                     : empirical_oce_risk(batch, alpha, spec, scaling, opts).value;
}

void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("validation", std::string(name) + " must lie in (0, 1)");
  }
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("validation", "quantile level must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void BoundParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("validation", what); };
  const std::pair<const char*, double> positive[] = {
      {"sigma2", sigma2},     {"psi_bar", psi_bar},           {"phi_bar", phi_bar},
      {"diameter", diameter}, {"lipschitz_pi", lipschitz_pi}, {"big_m", big_m},
      {"gap_c", gap_c},       {"epsilon", epsilon}};
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be positive and finite");
  }
  if (!(tau_gap >= 0.0) || !std::isfinite(tau_gap)) fail("tau_gap must be nonnegative");
  const std::pair<const char*, double> probs[] = {{"beta", beta}, {"gamma", gamma}, {"delta", delta}};
  for (const auto& [name, v] : probs) {
    if (!(v > 0.0 && v < 1.0)) fail(std::string(name) + " must lie in (0, 1)");
  }
  if (epsilon > gap_c) fail("epsilon must not exceed gap_c");
  if (!(epsilon > lipschitz_pi * tau_gap)) fail("epsilon must exceed lipschitz_pi * tau_gap");
  if (m_groups < 1) fail("m_groups must be at least 1");
}

BoundParams parse_bound_params(std::string_view text) {
  BoundParams p;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (eq == std::string_view::npos) throw ParseError("validation", where() + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view raw = trim(line.substr(eq + 1));

    if (key == "m_groups") {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ParseError("validation", where() + "m_groups needs an integer");
      }
      p.m_groups = v;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
      throw ParseError("validation", where() + "cannot read a number for '" + key + "'");
    }
    double* slot = key == "sigma2"         ? &p.sigma2
                   : key == "psi_bar"      ? &p.psi_bar
                   : key == "phi_bar"      ? &p.phi_bar
                   : key == "diameter"     ? &p.diameter
                   : key == "lipschitz_pi" ? &p.lipschitz_pi
                   : key == "tau_gap"      ? &p.tau_gap
                   : key == "gap_c"        ? &p.gap_c
                   : key == "big_m"        ? &p.big_m
                   : key == "beta"         ? &p.beta
                   : key == "gamma"        ? &p.gamma
                   : key == "delta"        ? &p.delta
                   : key == "epsilon"      ? &p.epsilon
                                           : nullptr;
    if (!slot) throw ParseError("validation", where() + "unknown key '" + key + "'");
    *slot = v;
  }
  return p;
}

std::string_view side_name(BoundSide side) { return side == BoundSide::Lower ? "lower" : "upper"; }

double objective_to_index(RegretScaling scaling, double value) {
  return scaling == RegretScaling::InverseAlpha ? value : 1.0 - value;
}

BoundSide candidate_side(RegretScaling scaling) {
  return scaling == RegretScaling::InverseAlpha ? BoundSide::Lower : BoundSide::Upper;
}

BoundSide lagrangian_side(RegretScaling scaling) {
  return scaling == RegretScaling::InverseAlpha ? BoundSide::Upper : BoundSide::Lower;
}

LagrangianSolution solve_lagrangian(const ItemBatch& batch, double pi_tilde,
                                    const DivergenceSpec& spec, RegretScaling scaling,
                                    const RiskOptions& opts, bool literal_sup) {
  batch.validate();
  if (!std::isfinite(pi_tilde)) throw ArgumentError("validation", "multiplier must be finite");
  const Interval box = alpha_box(scaling, opts.alpha_min);

  auto lagrangian = [&](double alpha) {
    const double obj = satisficing_objective(scaling, alpha);
    if (pi_tilde == 0.0) return obj;
    try {
      return obj + pi_tilde * inner_value(batch, alpha, spec, scaling, opts, literal_sup);
    } catch (const InfeasibleEvaluation&) {
      return -kInfinity;
    }
  };

  // The Lagrangian need not be unimodal in alpha: scan a grid, then refine
  // around the best grid point.
  const double step = (box.upper - box.lower) / kLagrangianGrid;
  int best_k = -1;
  double best = -kInfinity;
  for (int k = 0; k <= kLagrangianGrid; ++k) {
    const double a = k == kLagrangianGrid ? box.upper : box.lower + k * step;
    const double v = lagrangian(a);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  if (best_k < 0) {
    throw SolverError("validation", "Lagrangian has no finite value on the alpha box for item '" +
                                        batch.item_id + "'");
  }
  LagrangianSolution sol{best_k == kLagrangianGrid ? box.upper : box.lower + best_k * step, best};
  const double lo = std::max(box.lower, box.lower + (best_k - 1) * step);
  const double hi = std::min(box.upper, box.lower + (best_k + 1) * step);
  const GoldenResult r = golden_section_minimize(
      [&](double a) { return -lagrangian(a); }, lo, hi, GoldenOptions{1e-9, 200});
  if (-r.value > sol.value) sol = {r.argmin, -r.value};
  return sol;
}

double estimate_multiplier(const ItemBatch& batch, double alpha_star, const DivergenceSpec& spec,
                           RegretScaling scaling, const RiskOptions& opts) {
  const Interval box = alpha_box(scaling, opts.alpha_min);
  const double n = static_cast<double>(batch.samples.size());
  double h = std::max(1e-3, 1.0 / n);
  h = std::min({h, 0.5 * (alpha_star - box.lower), 0.5 * (box.upper - alpha_star)});
  if (!(h > 1e-7)) return 0.0;
  double slope = 0.0;
  try {
    slope = (constraint_value(batch, alpha_star + h, spec, scaling, opts) -
             constraint_value(batch, alpha_star - h, spec, scaling, opts)) /
            (2.0 * h);
  } catch (const InfeasibleEvaluation&) {
    return 0.0;
  }
  if (!std::isfinite(slope) || slope == 0.0) return 0.0;
  const double pi = -satisficing_objective_slope(scaling) / slope;
  return std::min(pi, 0.0);
}

bool upper_bound_decision(double q_tilde, double s_q, double delta) {
  require_probability(delta, "delta");
  if (s_q == 0.0) return q_tilde <= 0.0;
  return -q_tilde / s_q >= normal_quantile(1.0 - delta);
}

UpperBoundReport upper_bound_check(double alpha_tilde, const ItemBatch& resample,
                                   const DivergenceSpec& spec, RegretScaling scaling, double delta,
                                   const RiskOptions& opts, bool literal_sup) {
  resample.validate();
  require_probability(delta, "delta");
  if (resample.samples.size() < 30) {
    throw ArgumentError("validation", "resample needs at least 30 observations");
  }
  UpperBoundReport rep;
  rep.alpha_tilde = alpha_tilde;
  rep.confidence = 1.0 - delta;
  rep.bound = index_from_alpha(alpha_tilde);
  rep.side = candidate_side(scaling);

  InnerSolveResult inner;
  try {
    inner = literal_sup ? empirical_oce_sup(resample, alpha_tilde, spec, scaling, opts)
                        : empirical_oce_risk(resample, alpha_tilde, spec, scaling, opts);
  } catch (const InfeasibleEvaluation&) {
    rep.q_tilde = kInfinity;
    rep.z_delta = -kInfinity;
    return rep;
  }
  const std::vector<double> terms =
      oce_terms(resample.samples, resample.target, alpha_tilde, inner.eta_star, spec, scaling);
  const double nq = static_cast<double>(terms.size());
  const double q = std::accumulate(terms.begin(), terms.end(), 0.0) / nq;
  double ss = 0.0;
  for (double t : terms) ss += (t - q) * (t - q);
  rep.q_tilde = q;
  rep.s_q = std::sqrt(ss / (nq * (nq - 1.0)));
  if (rep.s_q > 0.0) {
    rep.z_delta = -q / rep.s_q;
  } else {
    rep.z_delta = q <= 0.0 ? kInfinity : -kInfinity;
  }
  rep.accepted = upper_bound_decision(q, rep.s_q, delta);
  return rep;
}

LowerBoundReport lower_bound_from_values(std::vector<double> values, double gamma, BoundSide side,
                                         std::optional<double> big_m) {
  require_probability(gamma, "gamma");
  if (values.size() < 2) throw ArgumentError("validation", "need at least two groups");
  if (big_m) {
    for (double& v : values) v = std::clamp(v, 0.0, *big_m);
  }
  const double m = static_cast<double>(values.size());
  LowerBoundReport rep;
  rep.side = side;
  rep.confidence = 1.0 - gamma;
  rep.l_tilde = std::accumulate(values.begin(), values.end(), 0.0) / m;
  double ss = 0.0;
  for (double v : values) ss += (v - rep.l_tilde) * (v - rep.l_tilde);
  rep.s_l = std::sqrt(ss / (m * (m - 1.0)));
  rep.z = normal_quantile(1.0 - gamma / 2.0);
  rep.bound = side == BoundSide::Lower ? rep.l_tilde - rep.z * rep.s_l : rep.l_tilde + rep.z * rep.s_l;
  rep.group_values = std::move(values);
  return rep;
}

LowerBoundReport lower_bound_estimate(const std::vector<ItemBatch>& groups, double pi_tilde,
                                      const DivergenceSpec& spec, RegretScaling scaling,
                                      double gamma, const RiskOptions& opts, bool literal_sup,
                                      std::optional<double> big_m) {
  if (groups.size() < 2) throw ArgumentError("validation", "need at least two groups");
  std::vector<double> values(groups.size());
  parallel_for(groups.size(), [&](std::size_t m) {
    const LagrangianSolution s =
        solve_lagrangian(groups[m], pi_tilde, spec, scaling, opts, literal_sup);
    values[m] = objective_to_index(scaling, s.value);
  });
  return lower_bound_from_values(std::move(values), gamma, lagrangian_side(scaling), big_m);
}

namespace {

struct SizeTerms {
  double v1, v2, v3;
  double gap3;  // c - epsilon - z M^2 / 4
};

SizeTerms size_terms(const BoundParams& p) {
  p.validate();
  const double z = normal_quantile(1.0 - p.gamma / 2.0);
  const double gap3 = p.gap_c - p.epsilon - z * p.big_m * p.big_m / 4.0;
  if (!(gap3 > 0.0)) {
    std::ostringstream os;
    os << "c - epsilon - z_{gamma/2} M^2/4 = " << gap3 << " is not positive (c = " << p.gap_c
       << ", epsilon = " << p.epsilon << ", M = " << p.big_m << ", gamma = " << p.gamma << ")";
    throw InfeasibleParameters("validation", os.str());
  }
  const double mass = 4.0 * (p.psi_bar + p.phi_bar);
  const double eps2 = p.epsilon - p.lipschitz_pi * p.tau_gap;
  return {1.0 / (mass / p.epsilon + 2.0), 1.0 / (mass * p.lipschitz_pi / eps2 + 2.0),
          1.0 / (mass / gap3 + 2.0), gap3};
}

double net_factor(double diameter, double v) { return 2.0 + diameter / (v * v); }

}  // namespace

SampleSizeResult required_sample_size(const BoundParams& p) {
  const SizeTerms t = size_terms(p);
  const double log_b = std::log(2.0 / p.beta);
  auto l = [&](double v) { return log_b + std::log(net_factor(p.diameter, v)); };
  const double s8 = 8.0 * p.sigma2;
  const double c2 = p.lipschitz_pi * p.lipschitz_pi;
  const double eps2 = p.epsilon - p.lipschitz_pi * p.tau_gap;
  const double first = std::max(s8 / (p.epsilon * p.epsilon) * l(t.v1), s8 * c2 / (eps2 * eps2) * l(t.v2));
  const double third = s8 * c2 / (t.gap3 * t.gap3) * l(t.v3) * p.m_groups;
  SampleSizeResult r;
  r.v1 = t.v1;
  r.v2 = t.v2;
  r.v3 = t.v3;
  r.raw = first + third;
  r.n = static_cast<std::int64_t>(std::ceil(r.raw));
  return r;
}

double ranking_validity_probability(std::int64_t n1, std::int64_t n2, int items,
                                    const BoundParams& p) {
  if (n1 < 1 || n2 < 1) throw ArgumentError("validation", "n1 and n2 must be at least 1");
  if (items < 2) throw ArgumentError("validation", "need at least two items");
  const SizeTerms t = size_terms(p);
  const double s8 = 8.0 * p.sigma2;
  const double c = p.lipschitz_pi;
  const double eps2 = p.epsilon - c * p.tau_gap;
  auto bracket = [&](double v, double exponent) {
    return std::clamp(1.0 - 2.0 * net_factor(p.diameter, v) * std::exp(exponent), 0.0, 1.0);
  };
  const double a1 = bracket(t.v1, -static_cast<double>(n1) * p.epsilon * p.epsilon / s8);
  const double a2 = bracket(t.v2, -static_cast<double>(n1) * eps2 * eps2 / (s8 * c * c));
  const double b = bracket(t.v3, -static_cast<double>(n2) * t.gap3 * t.gap3 / s8);
  return std::pow(std::min(a1, a2), items) * std::pow(b, items);
}

std::vector<ItemBatch> partition_groups(const ItemBatch& batch, int groups) {
  if (groups < 2) throw ArgumentError("validation", "need at least two groups");
  const std::size_t size = batch.samples.size() / static_cast<std::size_t>(groups);
  if (size == 0) throw ArgumentError("validation", "fewer observations than groups");
  std::vector<ItemBatch> out(static_cast<std::size_t>(groups));
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m].item_id = batch.item_id;
    out[m].target = batch.target;
    out[m].samples.assign(batch.samples.begin() + static_cast<std::ptrdiff_t>(m * size),
                          batch.samples.begin() + static_cast<std::ptrdiff_t>((m + 1) * size));
  }
  return out;
}

ItemValidation validate_item(const ItemBatch& main, const ItemBatch& resample,
                             const std::vector<ItemBatch>& groups, const DivergenceSpec& spec,
                             RegretScaling scaling, const ValidationOptions& opts) {
  require_probability(opts.delta, "delta");
  require_probability(opts.gamma, "gamma");
  ItemValidation out;
  out.item_id = main.item_id;
  out.saa = satisficing_binary_search(main, spec, scaling, opts.batch);
  out.pi_tilde = estimate_multiplier(main, out.saa.alpha_star, spec, scaling, opts.batch.risk);

  const double z_accept = normal_quantile(1.0 - opts.delta);
  BatchOptions shrunk = opts.batch;
  double threshold = opts.batch.threshold_is_target ? main.target : opts.batch.threshold;
  shrunk.threshold_is_target = false;
  BatchSolution candidate = out.saa;
  for (int round = 0;; ++round) {
    UpperBoundReport rep = upper_bound_check(candidate.alpha_star, resample, spec, scaling,
                                             opts.delta, opts.batch.risk, opts.literal_sup);
    rep.threshold = threshold;
    rep.rounds = round;
    out.candidate = rep;
    if (rep.accepted || round >= opts.max_shrink_rounds || !std::isfinite(rep.q_tilde)) break;
    // Lower the right-hand side by at least the shortfall that blocked acceptance.
    const double shortfall = rep.q_tilde + z_accept * rep.s_q;
    threshold -= std::max(shortfall, 0.1 * std::abs(threshold - rep.q_tilde));
    shrunk.threshold = threshold;
    candidate = satisficing_binary_search(main, spec, scaling, shrunk);
  }

  out.lagrangian = lower_bound_estimate(groups, out.pi_tilde, spec, scaling, opts.gamma,
                                        opts.batch.risk, opts.literal_sup, opts.big_m);
  if (scaling == RegretScaling::InverseAlpha) {
    out.lower = out.candidate.bound;
    out.upper = out.lagrangian.bound;
  } else {
    out.lower = out.lagrangian.bound;
    out.upper = out.candidate.bound;
  }
  const double width = out.upper - out.lower;
  out.relative_gap = out.upper != 0.0 ? width / std::abs(out.upper)
                                      : (width == 0.0 ? 0.0 : kInfinity);
  return out;
}

}  // namespace satisrank

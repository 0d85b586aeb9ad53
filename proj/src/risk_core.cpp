#include "satisrank/risk_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "satisrank/error.hpp"

namespace satisrank {
namespace {

[[noreturn]] void bad_alpha(double alpha, const Interval& box) {
  std::ostringstream os;
  os << "alpha = " << alpha << " outside [" << box.lower << ", " << box.upper << "]";
  throw ArgumentError("risk_core", os.str());
}

// Smallest step that moves x strictly toward +inf/-inf by a relative margin.
double nudge(double x, double direction) {
  return x + direction * 1e-12 * (1.0 + std::abs(x));
}

}  // namespace

void ItemBatch::validate() const {
  if (samples.empty()) {
    throw ArgumentError("risk_core", "item '" + item_id + "' has no samples");
  }
  if (!std::isfinite(target)) {
    throw ArgumentError("risk_core", "item '" + item_id + "' has a non-finite target");
  }
  for (double d : samples) {
    if (!std::isfinite(d)) {
      throw ArgumentError("risk_core", "item '" + item_id + "' has a non-finite sample");
    }
  }
}

std::string_view scaling_name(RegretScaling scaling) {
  return scaling == RegretScaling::InverseAlpha ? "inv_alpha" : "inv_one_minus_alpha";
}

RegretScaling parse_scaling(std::string_view name) {
  if (name == "inv_alpha") return RegretScaling::InverseAlpha;
  if (name == "inv_one_minus_alpha") return RegretScaling::InverseOneMinusAlpha;
  throw ConfigError("risk_core", "unknown regret scaling '" + std::string(name) + "'");
}

double regret_scale(RegretScaling scaling, double alpha) {
  if (scaling == RegretScaling::InverseAlpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw ArgumentError("risk_core", "1/alpha requires alpha in (0, 1]");
    }
    return 1.0 / alpha;
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("risk_core", "1/(1-alpha) requires alpha in (0, 1)");
  }
  return 1.0 / (1.0 - alpha);
}

double regret_scale_derivative(RegretScaling scaling, double alpha) {
  const double f = regret_scale(scaling, alpha);
  return scaling == RegretScaling::InverseAlpha ? -f * f : f * f;
}

Interval alpha_box(RegretScaling scaling, double alpha_min) {
  Interval box;
  box.lower = alpha_min;
  box.upper = scaling == RegretScaling::InverseAlpha ? 1.0 : 1.0 - alpha_min;
  box.lower_open = false;
  box.upper_open = false;
  return box;
}

double satisficing_objective(RegretScaling scaling, double alpha) {
  return scaling == RegretScaling::InverseAlpha ? 1.0 - alpha : alpha;
}

double satisficing_objective_slope(RegretScaling scaling) {
  return scaling == RegretScaling::InverseAlpha ? -1.0 : 1.0;
}

double index_from_alpha(double alpha) { return 1.0 - alpha; }

Interval eta_bracket(const ItemBatch& batch, const DivergenceSpec& spec) {
  const auto [mn, mx] = std::minmax_element(batch.samples.begin(), batch.samples.end());
  const double lo_x = *mn - batch.target;
  const double hi_x = *mx - batch.target;
  const double margin = (hi_x - lo_x) + 1.0;

  Interval bracket;
  bracket.lower = lo_x - margin;
  bracket.upper = hi_x + margin;
  bracket.lower_open = false;
  bracket.upper_open = false;

  // Every x_n - eta must stay in dom phi*: eta > max(x) - U and eta < min(x) - L.
  const Interval dom = conjugate_domain(spec);
  if (std::isfinite(dom.upper)) {
    double feasible_lo = hi_x - dom.upper;
    if (dom.upper_open) feasible_lo = nudge(feasible_lo, 1.0);
    if (feasible_lo > bracket.lower) bracket.lower = feasible_lo;
  }
  if (std::isfinite(dom.lower)) {
    double feasible_hi = lo_x - dom.lower;
    if (dom.lower_open) feasible_hi = nudge(feasible_hi, -1.0);
    if (feasible_hi < bracket.upper) bracket.upper = feasible_hi;
  }
  if (bracket.upper < bracket.lower) {
    // Starting window lies outside the feasible range; restart from its edge.
    if (std::isfinite(dom.upper) && bracket.lower > hi_x + margin) {
      bracket.upper = bracket.lower + 2.0 * margin;
    } else {
      bracket.lower = bracket.upper - 2.0 * margin;
    }
  }
  return bracket;
}

double oce_objective(std::span<const double> samples, double target, double alpha, double eta,
                     const DivergenceSpec& spec, RegretScaling scaling) {
  double sum = 0.0;
  for (double d : samples) {
    const double v = conjugate_value(spec, d - target - eta);
    if (v == kInfinity) return kInfinity;
    sum += v;
  }
  return eta + regret_scale(scaling, alpha) * sum / static_cast<double>(samples.size());
}

std::vector<double> oce_terms(std::span<const double> samples, double target, double alpha,
                              double eta, const DivergenceSpec& spec, RegretScaling scaling) {
  const double f = regret_scale(scaling, alpha);
  std::vector<double> out;
  out.reserve(samples.size());
  for (double d : samples) out.push_back(eta + f * conjugate_value(spec, d - target - eta));
  return out;
}

namespace {

struct FiniteBracket {
  double lower;
  double upper;
  bool lower_is_domain_edge;
  bool upper_is_domain_edge;
};

// Shrinks [lower, upper] to the part where `objective` is finite.
template <class F>
FiniteBracket clip_to_finite(F& objective, Interval bracket, double tol) {
  FiniteBracket out{bracket.lower, bracket.upper, false, false};
  const bool lo_ok = std::isfinite(objective(out.lower));
  const bool hi_ok = std::isfinite(objective(out.upper));
  if (lo_ok && hi_ok) return out;

  double inside = 0.0;
  bool found = false;
  if (lo_ok) {
    inside = out.lower;
    found = true;
  } else if (hi_ok) {
    inside = out.upper;
    found = true;
  } else {
    constexpr int kProbes = 64;
    for (int i = 1; i < kProbes && !found; ++i) {
      const double x = out.lower + (out.upper - out.lower) * i / kProbes;
      if (std::isfinite(objective(x))) {
        inside = x;
        found = true;
      }
    }
  }
  if (!found) {
    std::ostringstream os;
    os << "objective is +inf on the whole eta bracket [" << bracket.lower << ", "
       << bracket.upper << "]";
    throw InfeasibleEvaluation("risk_core", os.str());
  }
  if (!lo_ok) {
    out.lower = bisect_finite_edge(objective, out.lower, inside, tol);
    out.lower_is_domain_edge = true;
  }
  if (!hi_ok) {
    out.upper = bisect_finite_edge(objective, out.upper, inside, tol);
    out.upper_is_domain_edge = true;
  }
  return out;
}

void check_alpha(RegretScaling scaling, double alpha, const RiskOptions& opts) {
  const Interval box = alpha_box(scaling, opts.alpha_min);
  if (!(alpha >= box.lower && alpha <= box.upper)) bad_alpha(alpha, box);
}

}  // namespace

InnerSolveResult empirical_oce_risk(const ItemBatch& batch, double alpha,
                                    const DivergenceSpec& spec, RegretScaling scaling,
                                    const RiskOptions& opts) {
  batch.validate();
  spec.validate();
  check_alpha(scaling, alpha, opts);

  auto objective = [&](double eta) {
    return oce_objective(batch.samples, batch.target, alpha, eta, spec, scaling);
  };

  const Interval start = eta_bracket(batch, spec);
  const double tol = opts.relative_tolerance * (1.0 + start.width());
  FiniteBracket br = clip_to_finite(objective, start, tol);

  // Hard limits from the conjugate domain; expansion never crosses them.
  const Interval feasible = [&] {
    Interval f;
    const Interval dom = conjugate_domain(spec);
    const auto [mn, mx] = std::minmax_element(batch.samples.begin(), batch.samples.end());
    if (std::isfinite(dom.upper)) f.lower = *mx - batch.target - dom.upper;
    if (std::isfinite(dom.lower)) f.upper = *mn - batch.target - dom.lower;
    return f;
  }();

  GoldenOptions gopts{tol, opts.max_iterations};
  GoldenResult res = golden_section_minimize(objective, br.lower, br.upper, gopts);
  int iterations = res.iterations;

  for (int e = 0;; ++e) {
    const double width = br.upper - br.lower;
    const bool at_upper = res.upper >= br.upper && !br.upper_is_domain_edge;
    const bool at_lower = res.lower <= br.lower && !br.lower_is_domain_edge;
    if (!at_upper && !at_lower) break;
    if (e == opts.max_expansions) {
      // Still descending after the bracket grew by 3^max_expansions.
      std::ostringstream os;
      os << "inner objective for item '" << batch.item_id << "' is unbounded below at alpha = "
         << alpha << " (" << kind_name(spec.kind) << ", theta = " << spec.theta << ")";
      throw SolverError("risk_core", os.str());
    }

    double probe = at_upper ? br.upper + 2.0 * width : br.lower - 2.0 * width;
    bool hits_edge = false;
    if (at_upper && probe >= feasible.upper) {
      probe = nudge(feasible.upper, -1.0);
      hits_edge = true;
    }
    if (at_lower && probe <= feasible.lower) {
      probe = nudge(feasible.lower, 1.0);
      hits_edge = true;
    }
    const double edge_value = at_upper ? objective(br.upper) : objective(br.lower);
    const double probe_value = objective(probe);
    // Flat beyond the edge: the edge value is already the infimum. A worse
    // probe still needs one more search, since the minimum may lie between.
    const double slack = 1e-14 * (1.0 + std::abs(edge_value));
    if (std::abs(probe_value - edge_value) <= slack) break;

    if (at_upper) {
      br.lower = res.lower;
      br.upper = probe;
      br.upper_is_domain_edge = hits_edge;
    } else {
      br.upper = res.upper;
      br.lower = probe;
      br.lower_is_domain_edge = hits_edge;
    }
    if (hits_edge) {
      const FiniteBracket clipped = clip_to_finite(objective, Interval{br.lower, br.upper, false, false}, tol);
      br.lower = clipped.lower;
      br.upper = clipped.upper;
      br.lower_is_domain_edge = br.lower_is_domain_edge || clipped.lower_is_domain_edge;
      br.upper_is_domain_edge = br.upper_is_domain_edge || clipped.upper_is_domain_edge;
    }
    gopts.tolerance = opts.relative_tolerance * (1.0 + (br.upper - br.lower));
    res = golden_section_minimize(objective, br.lower, br.upper, gopts);
    iterations += res.iterations;
  }

  InnerSolveResult out;
  out.value = res.value;
  out.eta_star = res.argmin;
  for (double end : {br.lower, br.upper}) {
    const double v = objective(end);
    if (v < out.value) {
      out.value = v;
      out.eta_star = end;
    }
  }
  out.iterations = iterations;
  out.bracket = Interval{br.lower, br.upper, false, false};
  if (!std::isfinite(out.value)) {
    throw InfeasibleEvaluation("risk_core", "no finite objective value found for item '" +
                                                batch.item_id + "'");
  }
  return out;
}

InnerSolveResult empirical_oce_sup(const ItemBatch& batch, double alpha,
                                   const DivergenceSpec& spec, RegretScaling scaling,
                                   const RiskOptions& opts) {
  batch.validate();
  spec.validate();
  check_alpha(scaling, alpha, opts);
  auto objective = [&](double eta) {
    return oce_objective(batch.samples, batch.target, alpha, eta, spec, scaling);
  };
  const Interval start = eta_bracket(batch, spec);
  const double tol = opts.relative_tolerance * (1.0 + start.width());
  const FiniteBracket br = clip_to_finite(objective, start, tol);
  const double lo_v = objective(br.lower);
  const double hi_v = objective(br.upper);
  InnerSolveResult out;
  out.value = std::max(lo_v, hi_v);
  out.eta_star = lo_v >= hi_v ? br.lower : br.upper;
  out.bracket = Interval{br.lower, br.upper, false, false};
  return out;
}

double cvar_closed_form(const ItemBatch& batch, double alpha) {
  batch.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ArgumentError("risk_core", "cvar_closed_form requires alpha in (0, 1]");
  }
  std::vector<double> x;
  x.reserve(batch.samples.size());
  for (double d : batch.samples) x.push_back(d - batch.target);
  std::sort(x.begin(), x.end(), std::greater<>());

  const double n = static_cast<double>(x.size());
  const double mass = alpha * n;
  std::size_t k = static_cast<std::size_t>(std::ceil(mass));
  k = std::clamp<std::size_t>(k, 1, x.size());
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) head += x[i];
  const double partial = mass - static_cast<double>(k - 1);
  return (head + partial * x[k - 1]) / mass;
}

}  // namespace satisrank

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satisrank/divergence.hpp"
#include "satisrank/golden_section.hpp"

namespace satisrank {

/// Lower clamp standing in for the open end of alpha in (0, 1].
inline constexpr double kAlphaMin = 1e-6;

/// One item's loss observations and its aspiration level (target).
struct ItemBatch {
  std::string item_id;
  std::vector<double> samples;
  double target = 0.0;

  /// Throws ArgumentError for empty or non-finite samples or target.
  void validate() const;
};

/// Regret multiplier f(alpha) in front of the sample mean of phi*.
enum class RegretScaling {
  InverseAlpha,          // 1 / alpha
  InverseOneMinusAlpha,  // 1 / (1 - alpha)
};

std::string_view scaling_name(RegretScaling scaling);  // inv_alpha | inv_one_minus_alpha
RegretScaling parse_scaling(std::string_view name);

/// f(alpha). Throws ArgumentError where f is undefined.
double regret_scale(RegretScaling scaling, double alpha);

/// f'(alpha).
double regret_scale_derivative(RegretScaling scaling, double alpha);

/// Box of admissible alpha for a scaling: [alpha_min, 1] for 1/alpha and
/// [alpha_min, 1 - alpha_min] for 1/(1 - alpha).
Interval alpha_box(RegretScaling scaling, double alpha_min = kAlphaMin);

/// Objective that the satisficing problem maximizes: 1 - alpha under
/// 1/alpha, and alpha under 1/(1 - alpha) (whose constraint tightens as
/// alpha grows).
double satisficing_objective(RegretScaling scaling, double alpha);
double satisficing_objective_slope(RegretScaling scaling);

/// Satisficing index read off an objective value: 1 - alpha in both cases.
double index_from_alpha(double alpha);

struct RiskOptions {
  double alpha_min = kAlphaMin;
  double relative_tolerance = 1e-8;  // tol_eta = rel * (1 + bracket width)
  int max_iterations = 200;
  int max_expansions = 60;
};

struct InnerSolveResult {
  double value = 0.0;     // min over eta of the empirical objective
  double eta_star = 0.0;  // argmin
  int iterations = 0;
  Interval bracket;       // bracket in which the final search ran
};

/// Starting bracket for eta: [min(d) - tau - R, max(d) - tau + R] with
/// R = max(d) - min(d) + 1, intersected with the eta range where every
/// d_n - tau - eta lies in dom phi*.
Interval eta_bracket(const ItemBatch& batch, const DivergenceSpec& spec);

/// eta + f(alpha) * mean_n phi*(d_n - tau - eta); +inf if any term is.
double oce_objective(std::span<const double> samples, double target, double alpha,
                     double eta, const DivergenceSpec& spec, RegretScaling scaling);

/// Per-sample terms eta + f(alpha) phi*(d_n - tau - eta) at a fixed eta.
std::vector<double> oce_terms(std::span<const double> samples, double target, double alpha,
                              double eta, const DivergenceSpec& spec, RegretScaling scaling);

/// Empirical OCE-type risk of (samples - target) at level alpha:
/// inf_eta { eta + f(alpha) (1/N) sum phi*(d_n - tau - eta) }.
/// Throws ArgumentError for alpha outside the admissible box and
/// InfeasibleEvaluation when no eta gives a finite objective.
InnerSolveResult empirical_oce_risk(const ItemBatch& batch, double alpha,
                                    const DivergenceSpec& spec, RegretScaling scaling,
                                    const RiskOptions& opts = {});

/// "sup over eta" variant, behind a flag only. The supremum of a convex
/// function over the bracket sits at an end point.
InnerSolveResult empirical_oce_sup(const ItemBatch& batch, double alpha,
                                   const DivergenceSpec& spec, RegretScaling scaling,
                                   const RiskOptions& opts = {});

/// Exact discrete CVaR of (samples - target) at level alpha in (0, 1] from the
/// sorted tail. Independent of the golden-section path.
double cvar_closed_form(const ItemBatch& batch, double alpha);

}  // namespace satisrank

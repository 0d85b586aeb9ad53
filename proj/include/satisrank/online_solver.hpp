#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "satisrank/divergence.hpp"
#include "satisrank/risk_core.hpp"

namespace satisrank {

/// Pull-style source of scalar observations. next() returns nullopt once the
/// source is exhausted.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  virtual std::optional<double> next() = 0;
};

/// Replays a fixed vector.
class VectorSource : public ObservationSource {
 public:
  explicit VectorSource(std::vector<double> values) : values_(std::move(values)) {}
  std::optional<double> next() override {
    if (pos_ >= values_.size()) return std::nullopt;
    return values_[pos_++];
  }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

struct OnlineState {
  double alpha = 1.0;
  double eta = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  std::int64_t t = 0;
  double tau = 0.0;
  DivergenceSpec spec;
  RegretScaling scaling = RegretScaling::InverseAlpha;
};

/// Stand-in for phi* outside its domain.
inline constexpr double kConjugateSentinel = 1e12;

/// objective(alpha) + lambda [eta + f(alpha) phi*(d - tau - eta)].
double lagrangian_realization(const OnlineState& state, double d);

struct Subgradient {
  double g_alpha = 0.0;
  double g_eta = 0.0;
  double g_lambda = 0.0;
};

/// Outside dom phi* the eta component is +-1 toward the domain and the dual
/// terms are dropped.
Subgradient subgradient(const OnlineState& state, double d);

/// Step sizes gain / (t + 1 + offset); eta moves are multiplied by
/// eta_factor and lambda moves by lambda_factor. The default is the plain
/// 1/(t + 1) schedule.
struct StepRule {
  double gain = 1.0;
  double offset = 0.0;
  double eta_factor = 1.0;
  double lambda_factor = 1.0;
  Interval eta_box;
  double alpha_min = kAlphaMin;

  double step_size(std::int64_t t) const {
    return gain / (static_cast<double>(t) + 1.0 + offset);
  }
};

/// One primal ascent / dual descent step using the previous state's
/// gradient and realization. r is always the running mean of realizations.
OnlineState step(const OnlineState& state, double d, const StepRule& rule = {});

struct OnlineSettings {
  double gain = 2.0;
  double offset = 100.0;
  /// Scale eta and lambda moves by the warm-up spread (s^2 and 1/s^2).
  bool precondition = true;
  int warmup = 50;
  double alpha_min = kAlphaMin;
  /// Number of history points kept; one every ceil(iters / history_points).
  std::int64_t history_points = 1000;

  /// 1/t steps, no preconditioning.
  static OnlineSettings literal();
};

struct OnlineSetup {
  OnlineState init;
  StepRule rule;
  double spread = 1.0;  // warm-up standard deviation
};

/// Initial state and step rule from a warm-up window: eta box from the
/// warm-up bracket, eta0 = median - tau, alpha0 at the loose end of the box,
/// lambda0 = 0.
OnlineSetup make_setup(std::span<const double> warmup, double tau, const DivergenceSpec& spec,
                       RegretScaling scaling, const OnlineSettings& settings = {});

struct OnlineResult {
  OnlineState final_state;
  std::vector<std::int64_t> history_t;
  std::vector<double> r_history;
  double index_estimate = 0.0;  // from r, clipped to [0, 1]
  double state_index = 0.0;     // 1 - alpha_t
  bool exhausted = false;       // stream ended before iters steps
  StepRule rule;
};

/// Index read off a running value r: r under 1/alpha, 1 - r under
/// 1/(1 - alpha), clipped to [0, 1].
double index_from_value(RegretScaling scaling, double r);

/// Applies `iters` steps from `init`, one observation each.
OnlineResult run(ObservationSource& source, std::int64_t iters, const OnlineState& init,
                 const StepRule& rule, std::int64_t history_points = 1000);

/// Buffers the warm-up window, builds the setup from it, then runs over the
/// whole stream (warm-up observations included).
OnlineResult run_online(ObservationSource& source, std::int64_t iters, double tau,
                        const DivergenceSpec& spec, RegretScaling scaling,
                        const OnlineSettings& settings = {});

/// Least-squares slope of log mean-squared gap against log t. `runs[k][i]`
/// is run k's value at times[i]. Returns -inf when some mean-squared gap is
/// zero.
double convergence_diagnostic(const std::vector<std::int64_t>& times,
                              const std::vector<std::vector<double>>& runs, double r_star);

/// Mean over runs of (r - r_star)^2 at each time.
std::vector<double> mean_squared_gap(const std::vector<std::vector<double>>& runs, double r_star);

}  // namespace satisrank

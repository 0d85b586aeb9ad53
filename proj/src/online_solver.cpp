#include "satisrank/online_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "satisrank/error.hpp"

namespace satisrank {
namespace {

struct ConjugateAt {
  bool in_domain;
  double value;
  double slope;
  double x;
  Interval dom;
};

ConjugateAt evaluate(const OnlineState& s, double d) {
  ConjugateAt c;
  c.x = d - s.tau - s.eta;
  c.dom = conjugate_domain(s.spec);
  c.in_domain = c.dom.contains(c.x);
  if (c.in_domain) {
    c.value = conjugate_value(s.spec, c.x);
    c.in_domain = std::isfinite(c.value);
  }
  if (c.in_domain) {
    c.slope = conjugate_subgradient(s.spec, c.x);
  } else {
    c.value = kConjugateSentinel;
    c.slope = 0.0;
  }
  return c;
}

}  // namespace

double lagrangian_realization(const OnlineState& state, double d) {
  const ConjugateAt c = evaluate(state, d);
  const double f = regret_scale(state.scaling, state.alpha);
  return satisficing_objective(state.scaling, state.alpha) +
         state.lambda * (state.eta + f * c.value);
}

Subgradient subgradient(const OnlineState& state, double d) {
  const ConjugateAt c = evaluate(state, d);
  Subgradient g;
  if (!c.in_domain) {
    g.g_alpha = satisficing_objective_slope(state.scaling);
    g.g_eta = c.x >= c.dom.upper ? 1.0 : -1.0;
    g.g_lambda = 0.0;
    return g;
  }
  const double f = regret_scale(state.scaling, state.alpha);
  const double df = regret_scale_derivative(state.scaling, state.alpha);
  g.g_alpha = satisficing_objective_slope(state.scaling) + state.lambda * df * c.value;
  g.g_eta = state.lambda * (1.0 - f * c.slope);
  g.g_lambda = state.eta + f * c.value;
  return g;
}

OnlineState step(const OnlineState& state, double d, const StepRule& rule) {
  const Subgradient g = subgradient(state, d);
  const double realized = lagrangian_realization(state, d);
  const double a = rule.step_size(state.t);
  const Interval box = alpha_box(state.scaling, rule.alpha_min);

  OnlineState next = state;
  next.alpha = std::clamp(state.alpha + a * g.g_alpha, box.lower, box.upper);
  next.eta = std::clamp(state.eta + a * rule.eta_factor * g.g_eta, rule.eta_box.lower,
                        rule.eta_box.upper);
  next.lambda = std::min(0.0, state.lambda - a * rule.lambda_factor * g.g_lambda);
  next.t = state.t + 1;
  next.r = state.r - (state.r - realized) / static_cast<double>(next.t);
  return next;
}

OnlineSettings OnlineSettings::literal() {
  OnlineSettings s;
  s.gain = 1.0;
  s.offset = 0.0;
  s.precondition = false;
  return s;
}

OnlineSetup make_setup(std::span<const double> warmup, double tau, const DivergenceSpec& spec,
                       RegretScaling scaling, const OnlineSettings& settings) {
  spec.validate();
  if (warmup.empty()) throw ArgumentError("online_solver", "warm-up window is empty");
  if (!(settings.gain > 0.0) || !(settings.offset >= 0.0)) {
    throw ConfigError("online_solver", "step gain must be positive and offset nonnegative");
  }
  ItemBatch window{"warmup", std::vector<double>(warmup.begin(), warmup.end()), tau};
  window.validate();

  OnlineSetup setup;
  setup.rule.gain = settings.gain;
  setup.rule.offset = settings.offset;
  setup.rule.alpha_min = settings.alpha_min;
  setup.rule.eta_box = eta_bracket(window, spec);

  const double n = static_cast<double>(warmup.size());
  const double mean = std::accumulate(warmup.begin(), warmup.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : warmup) ss += (v - mean) * (v - mean);
  setup.spread = warmup.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  if (settings.precondition && setup.spread > 0.0) {
    setup.rule.eta_factor = setup.spread * setup.spread;
    setup.rule.lambda_factor = 1.0 / (setup.spread * setup.spread);
  }

  std::vector<double> sorted = window.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  const Interval box = alpha_box(scaling, settings.alpha_min);
  setup.init.alpha = scaling == RegretScaling::InverseAlpha ? box.upper : box.lower;
  setup.init.eta = std::clamp(median - tau, setup.rule.eta_box.lower, setup.rule.eta_box.upper);
  setup.init.lambda = 0.0;
  setup.init.r = 0.0;
  setup.init.t = 0;
  setup.init.tau = tau;
  setup.init.spec = spec;
  setup.init.scaling = scaling;
  return setup;
}

double index_from_value(RegretScaling scaling, double r) {
  const double v = scaling == RegretScaling::InverseAlpha ? r : 1.0 - r;
  return std::clamp(v, 0.0, 1.0);
}

OnlineResult run(ObservationSource& source, std::int64_t iters, const OnlineState& init,
                 const StepRule& rule, std::int64_t history_points) {
  if (iters < 1) throw ArgumentError("online_solver", "iters must be at least 1");
  if (history_points < 1) history_points = 1;
  const std::int64_t every = (iters + history_points - 1) / history_points;

  OnlineResult out;
  out.rule = rule;
  OnlineState state = init;
  for (std::int64_t i = 0; i < iters; ++i) {
    const std::optional<double> d = source.next();
    if (!d) {
      out.exhausted = true;
      break;
    }
    if (!std::isfinite(*d)) throw StreamError("online_solver", "non-finite observation in stream");
    state = step(state, *d, rule);
    if (state.t % every == 0 || i + 1 == iters) {
      out.history_t.push_back(state.t);
      out.r_history.push_back(state.r);
    }
  }
  if (out.exhausted && (out.history_t.empty() || out.history_t.back() != state.t) && state.t > 0) {
    out.history_t.push_back(state.t);
    out.r_history.push_back(state.r);
  }
  out.final_state = state;
  out.index_estimate = index_from_value(state.scaling, state.r);
  out.state_index = index_from_alpha(state.alpha);
  return out;
}

namespace {

// Replays a buffered prefix, then continues with the underlying source.
class PrefixedSource : public ObservationSource {
 public:
  PrefixedSource(std::vector<double> prefix, ObservationSource& rest)
      : prefix_(std::move(prefix)), rest_(rest) {}
  std::optional<double> next() override {
    if (pos_ < prefix_.size()) return prefix_[pos_++];
    return rest_.next();
  }

 private:
  std::vector<double> prefix_;
  std::size_t pos_ = 0;
  ObservationSource& rest_;
};

}  // namespace

OnlineResult run_online(ObservationSource& source, std::int64_t iters, double tau,
                        const DivergenceSpec& spec, RegretScaling scaling,
                        const OnlineSettings& settings) {
  if (iters < 1) throw ArgumentError("online_solver", "iters must be at least 1");
  if (settings.warmup < 1) throw ConfigError("online_solver", "warm-up window must be positive");
  const std::int64_t want = std::min<std::int64_t>(settings.warmup, iters);
  std::vector<double> prefix;
  prefix.reserve(static_cast<std::size_t>(want));
  while (static_cast<std::int64_t>(prefix.size()) < want) {
    const std::optional<double> d = source.next();
    if (!d) break;
    if (!std::isfinite(*d)) throw StreamError("online_solver", "non-finite observation in stream");
    prefix.push_back(*d);
  }
  if (prefix.empty()) throw StreamError("online_solver", "stream is empty");
  const OnlineSetup setup = make_setup(prefix, tau, spec, scaling, settings);
  PrefixedSource replay(std::move(prefix), source);
  return run(replay, iters, setup.init, setup.rule, settings.history_points);
}

std::vector<double> mean_squared_gap(const std::vector<std::vector<double>>& runs, double r_star) {
  if (runs.empty()) throw ArgumentError("online_solver", "no runs given");
  const std::size_t len = runs.front().size();
  std::vector<double> msg(len, 0.0);
  for (const auto& r : runs) {
    if (r.size() != len) throw ArgumentError("online_solver", "runs have different lengths");
    for (std::size_t i = 0; i < len; ++i) msg[i] += (r[i] - r_star) * (r[i] - r_star);
  }
  for (double& v : msg) v /= static_cast<double>(runs.size());
  return msg;
}

double convergence_diagnostic(const std::vector<std::int64_t>& times,
                              const std::vector<std::vector<double>>& runs, double r_star) {
  if (times.size() < 10) throw ArgumentError("online_solver", "need at least 10 history points");
  const std::vector<double> msg = mean_squared_gap(runs, r_star);
  if (msg.size() != times.size()) {
    throw ArgumentError("online_solver", "history length does not match the time grid");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < msg.size(); ++i) {
    if (times[i] < 1) throw ArgumentError("online_solver", "times must be positive");
    if (msg[i] == 0.0) return -kInfinity;
    lx.push_back(std::log(static_cast<double>(times[i])));
    ly.push_back(std::log(msg[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ArgumentError("online_solver", "time grid has no spread");
  return sxy / sxx;
}

}  // namespace satisrank

// Acceptance run: one PASS/FAIL line per criterion, followed by the numbers
// behind it. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "satisrank/batch_solver.hpp"
#include "satisrank/cli.hpp"
#include "satisrank/data_io.hpp"
#include "satisrank/error.hpp"
#include "satisrank/online_solver.hpp"
#include "satisrank/parallel.hpp"
#include "satisrank/ranking.hpp"
#include "satisrank/risk_core.hpp"
#include "satisrank/validation.hpp"

using namespace satisrank;

namespace {

const DivergenceSpec kCvar{DivergenceKind::CVaRIndicator, 0.0};
const DivergenceSpec kKl{DivergenceKind::KullbackLeibler, 0.0};
constexpr RegretScaling kIA = RegretScaling::InverseAlpha;
constexpr RegretScaling kIOMA = RegretScaling::InverseOneMinusAlpha;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok    " : "FAILED") + "  " + what);
  }
  void info(const std::string& what) { notes.push_back("info    " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ItemBatch random_batch(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> scale(0.5, 50.0), shift(-20.0, 20.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const double s = scale(rng), m = shift(rng);
  ItemBatch b{"x", {}, m + 0.3 * s * g(rng)};
  for (int i = 0; i < n; ++i) b.samples.push_back(m + s * g(rng));
  return b;
}

// Tail-sum oracle under 1/alpha: the smallest tail mass m/N whose top-m sum
// of (d - tau), with a fractional last term, is <= 0. Returns alpha*.
double exact_cvar_alpha(std::vector<double> x) {
  std::sort(x.begin(), x.end(), std::greater<>());
  const double n = static_cast<double>(x.size());
  if (x.front() <= 0.0) return kAlphaMin;
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double next = s + x[k];
    if (next <= 0.0 && x[k] < 0.0) return (static_cast<double>(k) + s / -x[k]) / n;
    s = next;
  }
  return 1.0;
}

// Normal model: under 1/(1 - alpha) the index is the tail mass p solving
// mu + sigma phi(z_p) / p = tau with z_p the upper p quantile.
double normal_model_index(double mu, double sigma, double tau) {
  auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  auto upper_quantile = [](double p) {
    double lo = -40, hi = 40;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double lo = 1e-9, hi = 1.0 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double p = 0.5 * (lo + hi);
    const double cvar = mu + sigma * pdf(upper_quantile(p)) / p;
    (cvar > tau ? lo : hi) = p;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> un(10, 500);
  std::uniform_real_distribution<double> ua(0.05, 1.0);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const ItemBatch b = random_batch(rng, un(rng));
    const double alpha = ua(rng);
    const double closed = cvar_closed_form(b, alpha);
    const double inner = empirical_oce_risk(b, alpha, kCvar, kIA).value;
    const double rel = std::abs(inner - closed) / std::max(std::abs(closed), 1.0);
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++bad;
  }
  o.require(bad == 0, fmt("1000 batches, %d outside relative 1e-6, worst %.2e", bad, worst));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double eps = 1e-4;
  BatchOptions opts;
  opts.epsilon = eps;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> un(10, 500);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const ItemBatch b = random_batch(rng, un(rng));
    const double diff = std::abs(satisficing_binary_search(b, kCvar, kIA, opts).index -
                                 cvar_satisficing_direct(b));
    worst = std::max(worst, diff);
    if (diff > 2 * eps + 1e-6) ++bad;
  }
  o.require(bad == 0, fmt("500 batches, %d outside 2eps+1e-6, worst %.2e", bad, worst));
  const ItemBatch two{"x", {-2.0, 1.0}, 0.0};
  const double bis = satisficing_binary_search(two, kCvar, kIA, opts).index;
  const double dir = cvar_satisficing_direct(two);
  o.require(std::abs(bis - 0.25) <= 2 * eps + 1e-6 && std::abs(dir - 0.25) <= 1e-6,
            fmt("{-2,1}, tau=0: bisection %.6f, direct %.6f", bis, dir));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const std::vector<int> sizes{50, 100, 250, 500, 1000, 5000};
  const int reps = 50;
  const double tau = 120.0;
  const DistributionSpec model = parse_distribution("normal:100:50");

  struct Rep {
    double opt, lower, upper, gap;
    bool accepted;
  };
  std::vector<std::vector<Rep>> results(sizes.size(), std::vector<Rep>(reps));
  parallel_for(sizes.size() * reps, [&](std::size_t job) {
    const std::size_t si = job / reps;
    const int r = static_cast<int>(job % reps);
    const int n = sizes[si];
    const std::uint64_t base = derive_seed(3000 + n, r);
    const ItemBatch main{"x", generate_synthetic(with_seed(model, derive_seed(base, 0, 0)), n), tau};
    const ItemBatch resample{
        "x", generate_synthetic(with_seed(model, derive_seed(base, 0, 1)), 10 * std::int64_t{n}), tau};
    const ItemValidation v = validate_item(main, resample, partition_groups(main, 10), kCvar, kIOMA);
    results[si][r] = {v.saa.index, v.lower, v.upper, v.relative_gap, v.candidate.accepted};
  });

  std::vector<double> med_gap;
  bool ordering_ok = true;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    int ordered = 0, accepted = 0;
    std::vector<double> gaps, opts, lbs, ubs;
    for (const Rep& r : results[si]) {
      if (r.lower <= r.opt && r.opt <= r.upper) ++ordered;
      if (r.accepted) ++accepted;
      gaps.push_back(r.gap);
      opts.push_back(r.opt);
      lbs.push_back(r.lower);
      ubs.push_back(r.upper);
    }
    med_gap.push_back(median(gaps));
    const bool ok = ordered >= 0.9 * reps;
    ordering_ok = ordering_ok && ok;
    o.info(fmt("N=%-5d LB<=Opt<=UB %2d/%d, candidate accepted %2d/%d, median Opt %.4f LB %.4f UB %.4f "
               "gap %.2f%%",
               sizes[si], ordered, reps, accepted, reps, median(opts), median(lbs), median(ubs),
               100 * med_gap.back()));
  }
  o.require(ordering_ok, "(a) LB <= Opt.Obj <= UB in >= 90% of replications at every N");
  const bool endpoints = med_gap.back() < med_gap.front();
  bool monotone = true;
  for (std::size_t i = 1; i < med_gap.size(); ++i) monotone = monotone && med_gap[i] < med_gap[i - 1];
  o.require(endpoints && monotone,
            fmt("(b) median gap strictly decreasing over all six N, %.2f%% -> %.2f%%",
                100 * med_gap.front(), 100 * med_gap.back()));

  // Monte Carlo oracle from 10^6 draws of the same model, via sorted tail sums.
  std::vector<double> x = generate_synthetic(with_seed(model, 999331), 1000000);
  for (double& v : x) v -= tau;
  // Under 1/(1 - alpha) the constraint at alpha is the 1/alpha one at 1 - alpha,
  // so the index 1 - alpha* equals the 1/alpha solution alpha*.
  const double mc = exact_cvar_alpha(x);
  const double analytic = normal_model_index(100.0, 50.0, tau);
  std::vector<double> opt5000;
  for (const Rep& r : results.back()) opt5000.push_back(r.opt);
  const double med = median(opt5000);
  int within = 0;
  for (double v : opt5000) within += std::abs(v - mc) <= 0.02;
  o.require(std::abs(med - mc) <= 0.02,
            fmt("Opt.Obj at N=5000 (median %.4f) vs 10^6-draw oracle %.4f", med, mc));
  o.info(fmt("replications within 0.02 of the oracle: %d/%d; analytic normal value %.4f", within,
             reps, analytic));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const std::int64_t T = 100000;
  const int seeds = 50;
  const double tau = 120.0;
  const DistributionSpec model = parse_distribution("normal:100:50");

  const ItemBatch big{"oracle", generate_synthetic(with_seed(model, 424242), 100000), tau};
  BatchOptions bo;
  bo.epsilon = 1e-7;
  const double oracle_index = satisficing_binary_search(big, kCvar, kIOMA, bo).index;
  const double r_star = 1.0 - oracle_index;  // objective alpha under 1/(1 - alpha)

  OnlineSettings settings;
  settings.history_points = T;
  std::vector<std::vector<double>> runs(seeds);
  std::vector<std::int64_t> times;
  parallel_for(seeds, [&](std::size_t s) {
    GeneratorSource src(with_seed(model, derive_seed(4000, s)));
    runs[s] = run_online(src, T, tau, kCvar, kIOMA, settings).r_history;
  });
  for (std::int64_t t = 1; t <= T; ++t) times.push_back(t);
  const std::vector<double> gap = mean_squared_gap(runs, r_star);

  std::vector<std::int64_t> fit_t;
  std::vector<std::vector<double>> fit_runs(seeds);
  for (int k = 0; k <= 20; ++k) {
    const auto t = static_cast<std::int64_t>(std::llround(std::pow(10.0, 3.0 + 0.1 * k)));
    fit_t.push_back(t);
    for (int s = 0; s < seeds; ++s) fit_runs[s].push_back(runs[s][t - 1]);
  }
  const double slope = convergence_diagnostic(fit_t, fit_runs, r_star);
  o.info(fmt("batch oracle index %.4f on 10^5 draws; mean squared gap t=10 %.3e, 100 %.3e, 1000 "
             "%.3e, 10^4 %.3e, 10^5 %.3e",
             oracle_index, gap[9], gap[99], gap[999], gap[9999], gap[T - 1]));
  o.require(slope >= -1.4 && slope <= -0.6,
            fmt("log-log slope over t in [10^3, 10^5]: %.3f (needs [-1.4, -0.6])", slope));
  o.require(gap[999] <= 0.25 * gap[9],
            fmt("gap(1000)/gap(10) = %.3f (needs <= 0.25)", gap[999] / gap[9]));

  // The plain 1/t schedule, for the record.
  GeneratorSource src(with_seed(model, derive_seed(4000, 0)));
  OnlineSettings literal = OnlineSettings::literal();
  literal.history_points = 10;
  const OnlineResult lit = run_online(src, 10000, tau, kCvar, kIOMA, literal);
  o.info(fmt("plain 1/t steps, seed 0, T=10^4: r = %.3e (target %.4f)", lit.final_state.r, r_star));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const int items = 8, seeds = 100;
  const std::int64_t T = 5000;
  const std::vector<std::int64_t> checkpoints{250, 500, 1000, 2000, 5000};
  const DistributionSpec model = parse_distribution("normal:100:50");
  std::vector<double> taus;
  for (int k = 0; k < items; ++k) taus.push_back(115.0 + 2.0 * k);

  OnlineSettings settings;
  settings.history_points = T;
  // losses[c][s]: inversion loss at checkpoint c for seed s.
  std::vector<std::vector<std::int64_t>> losses(checkpoints.size(), std::vector<std::int64_t>(seeds));
  parallel_for(seeds, [&](std::size_t s) {
    std::vector<std::vector<double>> hist(items);
    for (int k = 0; k < items; ++k) {
      GeneratorSource src(with_seed(model, derive_seed(5000 + s, k)));
      hist[k] = run_online(src, T, taus[k], kCvar, kIOMA, settings).r_history;
    }
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      std::vector<Score> est, truth;
      for (int k = 0; k < items; ++k) {
        const std::string id = "t" + std::to_string(static_cast<int>(taus[k]));
        est.emplace_back(id, index_from_value(kIOMA, hist[k][checkpoints[c] - 1]));
        // Under 1/(1 - alpha) a larger target gives a smaller index.
        truth.emplace_back(id, -taus[k]);
      }
      losses[c][s] = inversion_loss(est, truth);
    }
  });

  const std::int64_t pairs = items * (items - 1) / 2;
  std::vector<std::vector<double>> cdf(checkpoints.size(), std::vector<double>(pairs + 1));
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::int64_t e = 0; e <= pairs; ++e) {
      cdf[c][e] = static_cast<double>(std::count_if(losses[c].begin(), losses[c].end(),
                                                    [&](std::int64_t l) { return l <= e; })) /
                  seeds;
    }
    o.info(fmt("T=%-5lld P(E<=0) %.2f  P(E<=2) %.2f  P(E<=5) %.2f  P(E<=10) %.2f  max loss %lld",
               static_cast<long long>(checkpoints[c]), cdf[c][0], cdf[c][2], cdf[c][5], cdf[c][10],
               static_cast<long long>(*std::max_element(losses[c].begin(), losses[c].end()))));
  }
  const double good = cdf.back()[2];
  o.require(good >= 0.9, fmt("T=5000: loss <= 2 in %.0f%% of seeds (needs >= 90%%)", 100 * good));
  bool in_e = true, in_t = true;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::int64_t e = 1; e <= pairs; ++e) in_e = in_e && cdf[c][e] >= cdf[c][e - 1];
    if (c > 0) {
      for (std::int64_t e = 0; e <= pairs; ++e) in_t = in_t && cdf[c][e] >= cdf[c - 1][e];
    }
  }
  o.require(in_e, "empirical P(E <= e) nondecreasing in e at every T");
  o.require(in_t, "empirical P(E <= e) nondecreasing in T for every e");

  // Bound curves at the same e values, from the smallest adjacent index gap.
  const double c_gap = normal_model_index(100, 50, taus[0]) - normal_model_index(100, 50, taus[1]);
  std::string curve = "bound (c = " + fmt("%.4f", c_gap) + ", kappa' = 1):";
  for (std::int64_t e : {5, 10, 15, 20, 25}) {
    curve += fmt(" e=%lld %.3f/%.2f", static_cast<long long>(e),
                 loss_bound_probability(items, e, c_gap, 1.0, T), cdf.back()[e]);
  }
  o.info(curve + " (bound/empirical at T=5000)");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double eps = 1e-4;
  BatchOptions opts;
  opts.epsilon = eps;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> margin(0.01, 10.0), shift(0.0, 2.0), trans(-50.0, 50.0);
  std::uniform_int_distribution<int> un(5, 200);
  int attain = 0, apathy = 0, mono = 0, translate = 0;
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    for (const DivergenceSpec& spec : {kCvar, kKl}) {
      const int n = un(rng);
      ItemBatch below{"x", {}, trans(rng)}, above{"x", {}, below.target};
      for (int k = 0; k < n; ++k) {
        below.samples.push_back(below.target - margin(rng));
        above.samples.push_back(above.target + margin(rng));
      }
      attain += satisficing_binary_search(below, spec, kIA, opts).index >= 1.0 - kAlphaMin - eps;
      apathy += satisficing_binary_search(above, spec, kIA, opts).index <= eps;

      const ItemBatch b = random_batch(rng, n);
      ItemBatch worse = b;
      for (double& d : worse.samples) d += shift(rng);
      const double base = satisficing_binary_search(b, spec, kIA, opts).index;
      mono += satisficing_binary_search(worse, spec, kIA, opts).index <= base + 2 * eps;

      ItemBatch moved = b;
      const double c = trans(rng);
      for (double& d : moved.samples) d += c;
      moved.target += c;
      translate += std::abs(satisficing_binary_search(moved, spec, kIA, opts).index - base) <= 2 * eps;
    }
  }
  const int total = 2 * reps;
  o.require(attain == total, fmt("attainment content: index ~ 1 when every loss is below target (%d/%d)", attain, total));
  o.require(apathy == total, fmt("non-attainment apathy: index ~ 0 when every loss is above target (%d/%d)", apathy, total));
  o.require(mono == total, fmt("monotonicity: larger losses never raise the index (%d/%d)", mono, total));
  o.require(translate == total, fmt("translation: shifting losses and target together (%d/%d)", translate, total));
  o.info("cvar and kl under 1/alpha, 200 random batches each");
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int draws = 0, tried = 0, size_ok = 0, prob_ok = 0, loss_ok = 0;
  while (draws < 200) {
    ++tried;
    BoundParams p;
    p.sigma2 = 0.1 + 5 * u(rng);
    p.psi_bar = 0.1 + 3 * u(rng);
    p.phi_bar = 0.1 + 3 * u(rng);
    p.diameter = 0.5 + 20 * u(rng);
    p.lipschitz_pi = 0.2 + 2 * u(rng);
    p.gap_c = 0.2 + 2 * u(rng);
    p.epsilon = p.gap_c * (0.05 + 0.4 * u(rng));
    p.tau_gap = 0.9 * p.epsilon / p.lipschitz_pi * u(rng);
    p.big_m = 0.05 + 1.5 * u(rng);
    p.beta = 0.01 + 0.3 * u(rng);
    p.gamma = 0.01 + 0.5 * u(rng);
    p.m_groups = 2 + static_cast<int>(20 * u(rng));
    double base = 0.0;
    try {
      base = required_sample_size(p).raw;
    } catch (const InfeasibleParameters&) {
      continue;
    }
    ++draws;
    auto n_with = [&](auto edit) {
      BoundParams q = p;
      edit(q);
      return required_sample_size(q).raw;
    };
    const bool s = n_with([](BoundParams& q) { q.sigma2 *= 2; }) > base &&
                   n_with([](BoundParams& q) { q.beta /= 2; }) > base &&
                   n_with([](BoundParams& q) { q.diameter *= 2; }) > base &&
                   n_with([](BoundParams& q) { q.psi_bar *= 2; }) > base;
    size_ok += s;

    const std::int64_t n1 = 1 + static_cast<std::int64_t>(std::pow(10.0, 6 * u(rng)));
    const std::int64_t n2 = 1 + static_cast<std::int64_t>(std::pow(10.0, 6 * u(rng)));
    const int items = 2 + static_cast<int>(10 * u(rng));
    const double pr = ranking_validity_probability(n1, n2, items, p);
    const bool pv = pr >= 0.0 && pr <= 1.0 &&
                    ranking_validity_probability(2 * n1, n2, items, p) >= pr &&
                    ranking_validity_probability(n1, 2 * n2, items, p) >= pr &&
                    ranking_validity_probability(n1, n2, items + 1, p) <= pr &&
                    ranking_validity_probability(2 * n1, 2 * n2, items, p) <= 1.0;
    prob_ok += pv;

    const double c = 0.05 + 3 * u(rng), kappa = 50 * u(rng);
    const std::int64_t iters = 1 + static_cast<std::int64_t>(std::pow(10.0, 5 * u(rng)));
    const std::int64_t pairs = static_cast<std::int64_t>(items) * (items - 1) / 2;
    bool lv = true;
    double prev = -1.0;
    for (std::int64_t e = 0; e <= pairs; ++e) {
      const double v = loss_bound_probability(items, e, c, kappa, iters);
      lv = lv && v >= prev && v >= 0.0 && v <= 1.0;
      prev = v;
      lv = lv && loss_bound_probability(items, e, c, kappa, 2 * iters) >= v &&
           loss_bound_probability(items, e, c, 2 * kappa + 1, iters) <= v &&
           loss_bound_probability(items + 1, e, c, kappa, iters) <= v;
    }
    lv = lv && prev == 1.0;
    loss_ok += lv;
  }
  o.require(size_ok == draws, fmt("sample size grows with sigma2, 1/beta, D_E, Psi (%d/%d)", size_ok, draws));
  o.require(prob_ok == draws, fmt("validity probability in [0,1], monotone in n1, n2, items (%d/%d)", prob_ok, draws));
  o.require(loss_ok == draws, fmt("loss bound probability monotone in e, T, kappa', items (%d/%d)", loss_ok, draws));
  o.info(fmt("%d feasible draws out of %d tried", draws, tried));
  return o;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timestamp(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

Outcome criterion8() {
  Outcome o;
  const std::filesystem::path dir = std::filesystem::path(SATISRANK_TEST_TMPDIR) / "acceptance";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "items.csv") << "item_id,target,value\na,0,-2\na,0,1\nb,0,0.5\nb,0,-0.25\nb,0,-1\n";
    std::ofstream big(dir / "big.csv");
    big << "item_id,target,value\n";
    std::mt19937_64 brng(7);
    std::normal_distribution<double> unit(0, 1);
    for (int i = 0; i < 80; ++i) big << (i % 2 ? "a" : "b") << ",0.5," << format_double(unit(brng)) << "\n";
    std::ofstream(dir / "stream.csv") << "item_id,value\n";
    std::ofstream s(dir / "stream.csv", std::ios::app);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(100, 50);
    for (int i = 0; i < 600; ++i) s << (i % 2 ? "a" : "b") << "," << format_double(g(rng)) << "\n";
    std::ofstream(dir / "bound.params")
        << "sigma2 = 1\npsi_bar = 1\nphi_bar = 1\nepsilon = 0.1\nlipschitz_pi = 1\ntau_gap = 0.01\n"
           "gap_c = 0.9\ngamma = 0.5\nbig_m = 0.5\ndiameter = 10\nbeta = 0.1\nm_groups = 10\n";
  }
  const std::string d = dir.string() + "/";
  const std::vector<std::vector<std::string>> runs{
      {"batch", "--input", d + "items.csv", "--risk", "cvar"},
      {"batch", "--dist", "normal:100:50:42", "--n", "2000", "--tau", "115,120,125", "--risk", "kl"},
      {"online", "--dist", "normal:100:50:42", "--iters", "3000", "--tau", "115,121,127"},
      {"online", "--stream", d + "stream.csv", "--tau", "120", "--iters", "200"},
      {"bounds", "--dist", "normal:100:50:42", "--n", "500", "--tau", "120", "--scaling",
       "inv_one_minus_alpha", "--seed", "7"},
      {"bounds", "--input", d + "big.csv", "--seed", "7", "--groups", "4"},
      {"samplesize", "--params", d + "bound.params"},
      {"rankprob", "--items", "8", "--e", "5", "--c", "0.05", "--kappa", "2", "--iters", "5000"},
      {"rankprob", "--mode", "validity", "--items", "3", "--params", d + "bound.params", "--n1",
       "100000", "--n2", "10000"},
      {"simulate", "--dist", "normal:100:50:42", "--n", "1000", "--tau", "120", "--items", "3"}};
  int identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string reports[2];
    std::map<std::string, std::string> files[2];
    for (int k = 0; k < 2; ++k) {
      const std::filesystem::path out = dir / fmt("run%zu_%d.json", i, k);
      std::vector<std::string> args = runs[i];
      args.push_back("--out");
      args.push_back(runs[i][0] == "simulate" ? (dir / fmt("run%zu_%d.csv", i, k)).string() : out.string());
      std::ostringstream so, se;
      const int status = run_cli(args, so, se);
      if (status != 0) {
        o.info("run " + runs[i][0] + " failed: " + se.str());
        break;
      }
      reports[k] = strip_timestamp(runs[i][0] == "simulate" ? so.str() : read_file(out));
      // Artifacts other than the report, keyed by suffix so both runs line up.
      for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string stem = fmt("run%zu_%d", i, k);
        if (name.rfind(stem, 0) == 0 && name != out.filename().string()) {
          std::string content = read_file(entry.path());
          files[k][name.substr(stem.size())] = content;
        }
      }
    }
    // Reports name their own output paths, which differ between the two runs.
    auto normalize = [&](std::string s, int k) {
      const std::string tag = fmt("run%zu_%d", i, k);
      for (std::size_t pos; (pos = s.find(tag)) != std::string::npos;) s.replace(pos, tag.size(), "runX");
      return s;
    };
    const bool same = !reports[0].empty() && normalize(reports[0], 0) == normalize(reports[1], 1) &&
                      files[0] == files[1];
    identical += same;
    if (!same) o.info("differs: " + runs[i][0]);
  }
  o.require(identical == static_cast<int>(runs.size()),
            fmt("repeated CLI runs byte-identical apart from the timestamp (%d/%zu, sidecars included)",
                identical, runs.size()));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"CVaR inner solve matches the sorted-tail closed form", criterion1},
      {"bisection index matches the single concave CVaR problem", criterion2},
      {"bounds validation trend with sample size", criterion3},
      {"online convergence rate", criterion4},
      {"online ranking of eight targets", criterion5},
      {"satisficing axioms", criterion6},
      {"calculator monotonicity", criterion7},
      {"CLI determinism", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("CRITERION %zu %s  %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

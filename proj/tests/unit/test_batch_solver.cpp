#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "satisrank/batch_solver.hpp"
#include "satisrank/error.hpp"

using namespace satisrank;

namespace {

const DivergenceSpec kCvar{DivergenceKind::CVaRIndicator, 0};

// Exact CVaR index under 1/alpha. With x sorted descending, the tail sum
// S(m) = sum_{i<k} x_i + (m - k + 1) x_k over the mass m = alpha N is concave
// and piecewise linear, and the index is 1 - m*/N for the smallest m* > 0
// with S(m*) <= 0.
double exact_cvar_index(const ItemBatch& b) {
  std::vector<double> x;
  for (double d : b.samples) x.push_back(d - b.target);
  std::sort(x.begin(), x.end(), std::greater<>());
  const double n = static_cast<double>(x.size());
  if (x.front() <= 0.0) return 1.0 - kAlphaMin;
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double next = s + x[k];
    if (next <= 0.0 && x[k] < 0.0) {
      const double m = static_cast<double>(k) + s / -x[k];
      return 1.0 - m / n;
    }
    s = next;
  }
  return 0.0;
}

ItemBatch random_batch(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> shift(-1.5, 1.0);
  ItemBatch b{"x", {}, 0.0};
  const double mu = shift(rng);
  for (int i = 0; i < n; ++i) b.samples.push_back(mu + g(rng));
  return b;
}

}  // namespace

TEST_CASE("bisection examples") {
  SUBCASE("two-point batch") {
    const BatchSolution s = satisficing_binary_search({"a", {-2, 1}, 0.0}, kCvar, RegretScaling::InverseAlpha);
    CHECK(s.alpha_star == doctest::Approx(0.75).epsilon(1e-4));
    CHECK(s.index == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(s.index == 1.0 - s.alpha_star);
    CHECK(s.feasible_at_alpha_star);
  }
  SUBCASE("always below target") {
    const BatchSolution s = satisficing_binary_search({"a", {-1, -1, -1}, 0.0}, kCvar, RegretScaling::InverseAlpha);
    CHECK(s.alpha_star == kAlphaMin);
    CHECK(s.index == doctest::Approx(1.0).epsilon(1e-5));
  }
  SUBCASE("always above target") {
    const BatchSolution s = satisficing_binary_search({"a", {1, 1, 1}, 0.0}, kCvar, RegretScaling::InverseAlpha);
    CHECK(s.alpha_star == 1.0);
    CHECK(s.index == 0.0);
    CHECK_FALSE(s.feasible_at_alpha_star);
  }
  SUBCASE("epsilon must be positive") {
    BatchOptions o;
    o.epsilon = 0.0;
    CHECK_THROWS_AS(satisficing_binary_search({"a", {1}, 0.0}, kCvar, RegretScaling::InverseAlpha, o),
                    ArgumentError);
  }
}

TEST_CASE("direct convex path examples") {
  CHECK(cvar_satisficing_direct({"a", {-2, 1}, 0.0}) == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(cvar_satisficing_direct({"a", {1, 1}, 0.0}) == doctest::Approx(0.0));
  CHECK(cvar_satisficing_direct({"a", {-1, -1}, 0.0}) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("oracle: bisection and the direct path match the exact tail-sum index") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> un(5, 150);
  const double eps = 1e-4;
  for (int i = 0; i < 150; ++i) {
    const ItemBatch b = random_batch(rng, un(rng));
    const double exact = exact_cvar_index(b);
    const BatchSolution s = satisficing_binary_search(b, kCvar, RegretScaling::InverseAlpha);
    INFO("exact = ", exact, " bisection = ", s.index);
    CHECK(std::abs(s.index - exact) <= 2 * eps + 1e-6);
    CHECK(std::abs(cvar_satisficing_direct(b) - std::max(exact, 0.0)) <= 2e-6);
  }
}

TEST_CASE("oracle: under 1/(1 - alpha) the cvar index mirrors the 1/alpha index") {
  // g(alpha) is the CVaR at tail mass 1 - alpha, so the optimal tail mass is
  // the same in both models and the indices add up to one.
  std::mt19937_64 rng(32);
  for (int i = 0; i < 60; ++i) {
    const ItemBatch b = random_batch(rng, 80);
    const double ia = satisficing_binary_search(b, kCvar, RegretScaling::InverseAlpha).index;
    const double ioma = satisficing_binary_search(b, kCvar, RegretScaling::InverseOneMinusAlpha).index;
    if (ia <= 1e-9 || ia >= 1 - 1e-5) continue;  // box edges differ between the models
    CHECK(ia + ioma == doctest::Approx(1.0).epsilon(3e-4));
  }
}

TEST_CASE("property: bisection certificate") {
  std::mt19937_64 rng(33);
  for (const DivergenceSpec spec : {kCvar, DivergenceSpec{DivergenceKind::KullbackLeibler, 0},
                                    DivergenceSpec{DivergenceKind::ModifiedChiSquared, 0}}) {
    for (RegretScaling sc : {RegretScaling::InverseAlpha, RegretScaling::InverseOneMinusAlpha}) {
      for (int i = 0; i < 15; ++i) {
        const ItemBatch b = random_batch(rng, 50);
        BatchOptions o;
        const BatchSolution s = satisficing_binary_search(b, spec, sc, o);
        const Interval box = alpha_box(sc);
        if (s.feasible_at_alpha_star) {
          CHECK(constraint_value(b, s.alpha_star, spec, sc) <= o.feasibility_slack);
          // One step past the solution toward the tight end is infeasible.
          const double past = sc == RegretScaling::InverseAlpha ? s.alpha_star - 2 * o.epsilon
                                                                : s.alpha_star + 2 * o.epsilon;
          if (past > box.lower && past < box.upper) {
            CHECK(constraint_value(b, past, spec, sc) > 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("property: raising losses never raises the index") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> up(0.0, 0.5);
  for (int i = 0; i < 60; ++i) {
    const ItemBatch b = random_batch(rng, 40);
    ItemBatch worse = b;
    for (double& d : worse.samples) d += up(rng);
    CHECK(satisficing_binary_search(worse, kCvar, RegretScaling::InverseAlpha).index <=
          satisficing_binary_search(b, kCvar, RegretScaling::InverseAlpha).index + 2e-4);
  }
}

TEST_CASE("property: index is right-continuous under a uniform shift") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 20; ++i) {
    const ItemBatch b = random_batch(rng, 40);
    ItemBatch nudged = b;
    for (double& d : nudged.samples) d += 1e-9;
    CHECK(std::abs(satisficing_binary_search(nudged, kCvar, RegretScaling::InverseAlpha).index -
                   satisficing_binary_search(b, kCvar, RegretScaling::InverseAlpha).index) <= 2e-4);
  }
}

TEST_CASE("literal threshold compares against the target") {
  // Target 0 makes both tests coincide.
  const ItemBatch b{"a", {-2, 1}, 0.0};
  BatchOptions literal;
  literal.threshold_is_target = true;
  CHECK(satisficing_binary_search(b, kCvar, RegretScaling::InverseAlpha, literal).index ==
        doctest::Approx(0.25).epsilon(1e-4));
  // With target 1 the literal test accepts m <= 1, which loosens the constraint.
  const ItemBatch shifted{"a", {-1, 2}, 1.0};
  CHECK(satisficing_binary_search(shifted, kCvar, RegretScaling::InverseAlpha, literal).index >
        satisficing_binary_search(shifted, kCvar, RegretScaling::InverseAlpha).index);
}

TEST_CASE("rank_batch") {
  SUBCASE("axioms order the two extremes") {
    const BatchRanking r = rank_batch({{"loss", {1, 1, 1}, 0.0}, {"gain", {-1, -1, -1}, 0.0}}, kCvar,
                                      RegretScaling::InverseAlpha);
    REQUIRE(r.report.entries.size() == 2);
    CHECK(r.report.entries[0].item_id == "gain");
    CHECK(r.report.entries[1].item_id == "loss");
    CHECK(r.solutions[0].item_id == "loss");  // input order
  }
  SUBCASE("singleton") {
    const BatchRanking r = rank_batch({{"a", {-2, 1}, 0.0}}, kCvar, RegretScaling::InverseAlpha);
    CHECK(r.report.entries.size() == 1);
    CHECK(r.report.ties.empty());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(rank_batch({}, kCvar, RegretScaling::InverseAlpha), ArgumentError);
    CHECK_THROWS_AS(rank_batch({{"a", {1}, 0.0}, {"a", {2}, 0.0}}, kCvar, RegretScaling::InverseAlpha),
                    ArgumentError);
  }
  SUBCASE("targets order identical distributions") {
    std::mt19937_64 rng(36);
    std::normal_distribution<double> g(100.0, 50.0);
    std::vector<double> common(4000);
    for (double& v : common) v = g(rng);
    std::vector<ItemBatch> items;
    for (int k = 0; k < 8; ++k) items.push_back({"t" + std::to_string(115 + 2 * k), common, 115.0 + 2 * k});
    const BatchRanking ia = rank_batch(items, kCvar, RegretScaling::InverseAlpha);
    const BatchRanking ioma = rank_batch(items, kCvar, RegretScaling::InverseOneMinusAlpha);
    for (int k = 0; k < 8; ++k) {
      CHECK(ia.report.entries[k].item_id == "t" + std::to_string(129 - 2 * k));
      CHECK(ioma.report.entries[k].item_id == "t" + std::to_string(115 + 2 * k));
    }
  }
}

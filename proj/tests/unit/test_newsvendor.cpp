#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nvlab/error.hpp"
#include "nvlab/newsvendor.hpp"

using namespace nvlab;

namespace {

CostStructure costs(double c) { return CostStructure{12.0, c, 0.0}; }

// Closed-form uniform expectation: E[min(q, D)] for D uniform on {a..b}.
double uniform_expected_profit(int q, int a, int b, double p, double c) {
  const double n = b - a + 1;
  double sales = 0.0;
  for (int d = a; d <= b; ++d) sales += std::min(q, d);
  return p * sales / n - c * q;
}

}  // namespace

TEST_SUITE("core-model") {

TEST_CASE("profit matches the feedback example and direct evaluation") {
  CHECK(profit(185, 210, costs(3)) == 1665.0);
  CHECK(profit(0, 100, costs(3)) == 0.0);
  CHECK(profit(100, 50, costs(9)) == -300.0);
  CHECK_THROWS_AS(profit(-1, 10, costs(3)), InvalidScenarioError);
  CHECK_THROWS_AS(profit(1, -10, costs(3)), InvalidScenarioError);
}

TEST_CASE("profit is piecewise linear with its kink at the demand") {
  for (int d : {1, 57, 150, 300}) {
    CHECK(profit(d, d, costs(3)) == doctest::Approx((12 - 3) * d));
    for (int q = 0; q + 2 <= 400; q += 7) {
      const double s1 = profit(q + 1, d, costs(3)) - profit(q, d, costs(3));
      CHECK(s1 == doctest::Approx(q < d ? 12 - 3 : -3));
    }
  }
}

TEST_CASE("critical fractile") {
  CHECK(critical_fractile(costs(3)) == 0.75);
  CHECK(critical_fractile(costs(9)) == 0.25);
  CHECK(critical_fractile(costs(6)) == 0.5);
  CHECK_THROWS_AS(critical_fractile(costs(12)), InvalidScenarioError);
  CHECK_THROWS_AS(critical_fractile(costs(0)), InvalidScenarioError);
  double last = 1.0;
  for (double c = 0.5; c < 12.0; c += 0.5) {
    const double eta = critical_fractile(costs(c));
    CHECK(eta < last);
    last = eta;
  }
}

TEST_CASE("optimal quantities for every scenario of the grid") {
  struct Row {
    Experiment e;
    DemandKind k;
    Margin m;
    int q;
  };
  const Row rows[] = {
      {Experiment::kBaseline, DemandKind::kUniform, Margin::kHigh, 225},
      {Experiment::kBaseline, DemandKind::kUniform, Margin::kLow, 75},
      {Experiment::kBaseline, DemandKind::kTruncatedNormal, Margin::kHigh, 184},
      {Experiment::kBaseline, DemandKind::kTruncatedNormal, Margin::kLow, 117},
      {Experiment::kBaseline, DemandKind::kLognormal, Margin::kHigh, 165},
      {Experiment::kBaseline, DemandKind::kLognormal, Margin::kLow, 135},
      {Experiment::kRiskNeutral, DemandKind::kUniform, Margin::kHigh, 1125},
      {Experiment::kRiskNeutral, DemandKind::kUniform, Margin::kLow, 975},
      {Experiment::kRiskNeutral, DemandKind::kTruncatedNormal, Margin::kHigh, 1084},
      {Experiment::kRiskNeutral, DemandKind::kTruncatedNormal, Margin::kLow, 1017},
  };
  for (const auto& r : rows) {
    CAPTURE(to_string(r.e));
    CAPTURE(to_string(r.k));
    CHECK(optimal_quantity(make_scenario(r.e, r.k, r.m)) == r.q);
  }
}

TEST_CASE("lognormal parameters reproduce the two pinned quantiles") {
  const auto ln = DemandDistribution::lognormal(1, 300);
  CHECK(ln.location() == doctest::Approx(5.005610126169505).epsilon(1e-14));
  CHECK(ln.scale() == doctest::Approx(0.14875740914062366).epsilon(1e-14));
  // mpmath: truncated quantiles 164.99992 and 134.99998, truncated mean 150.9084.
  CHECK(ln.quantile(0.75) == doctest::Approx(164.99992).epsilon(1e-7));
  CHECK(ln.quantile(0.25) == doctest::Approx(134.99998).epsilon(1e-7));
  CHECK(ln.mean() == doctest::Approx(150.9084).epsilon(1e-6));
}

TEST_CASE("truncated normal CDF and quantile against mpmath values") {
  const auto tn = DemandDistribution::truncated_normal(1, 300);
  CHECK(tn.scale() == doctest::Approx(299.0 / 6.0));
  CHECK(tn.location() == 150.5);
  CHECK(tn.cdf(184) == doctest::Approx(0.7499596355).epsilon(1e-9));
  CHECK(discretize_cdf(tn, 184) == doctest::Approx(0.7531506783).epsilon(1e-9));
  CHECK(tn.quantile(0.75) == doctest::Approx(184.0063035).epsilon(1e-9));
  CHECK(tn.quantile(0.25) == doctest::Approx(116.9936965).epsilon(1e-9));
  CHECK(tn.mean() == doctest::Approx(150.5));
}

TEST_CASE("discretize_cdf on the uniform support") {
  const auto u = DemandDistribution::uniform(1, 300);
  CHECK(discretize_cdf(u, 225) == doctest::Approx(0.75));
  CHECK(discretize_cdf(u, 0) == 0.0);
  CHECK(discretize_cdf(u, 300) == 1.0);
  CHECK(u.mean() == 150.5);
}

TEST_CASE("discretize_cdf is monotone and hits 0 and 1 at the support edges") {
  for (const auto& d : {DemandDistribution::uniform(1, 300), DemandDistribution::truncated_normal(1, 300),
                        DemandDistribution::lognormal(1, 300), DemandDistribution::uniform(901, 1200),
                        DemandDistribution::truncated_normal(901, 1200)}) {
    CHECK(discretize_cdf(d, d.lower() - 1) == 0.0);
    CHECK(discretize_cdf(d, d.upper()) == 1.0);
    double last = 0.0;
    double mass = 0.0;
    for (int q = d.lower() - 5; q <= d.upper() + 5; ++q) {
      const double f = discretize_cdf(d, q);
      CHECK(f >= last);
      last = f;
      mass += d.pmf(q);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quantile inverts the CDF within one integer step") {
  for (const auto& d : {DemandDistribution::uniform(1, 300), DemandDistribution::truncated_normal(1, 300),
                        DemandDistribution::lognormal(1, 300)}) {
    for (int x = d.lower() + 1; x < d.upper(); x += 13) {
      CHECK(std::abs(d.quantile(d.cdf(x)) - x) <= 1.0);
    }
  }
}

TEST_CASE("expected profit for the uniform law") {
  const auto hi = make_scenario(Experiment::kBaseline, DemandKind::kUniform, Margin::kHigh);
  CHECK(expected_profit(300, hi) == doctest::Approx(906.0).epsilon(1e-12));
  CHECK(expected_profit(1, hi) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(expected_profit(225, hi) == doctest::Approx(1017.0).epsilon(1e-12));
  CHECK(expected_profit(150, hi) == doctest::Approx(903.0).epsilon(1e-12));
  for (int q = 0; q <= 300; q += 11) {
    CHECK(expected_profit(q, hi) ==
          doctest::Approx(uniform_expected_profit(q, 1, 300, 12, 3)).epsilon(1e-12));
  }
}

TEST_CASE("expected profit for the continuous kinds against mpmath summation") {
  using E = Experiment;
  using K = DemandKind;
  CHECK(expected_profit(184, make_scenario(E::kBaseline, K::kTruncatedNormal, Margin::kHigh)) ==
        doctest::Approx(1166.3432083920015).epsilon(1e-10));
  CHECK(expected_profit(117, make_scenario(E::kBaseline, K::kTruncatedNormal, Margin::kLow)) ==
        doctest::Approx(263.34320839200148).epsilon(1e-10));
  CHECK(expected_profit(165, make_scenario(E::kBaseline, K::kLognormal, Margin::kHigh)) ==
        doctest::Approx(1268.4768941152749).epsilon(1e-10));
  CHECK(expected_profit(135, make_scenario(E::kBaseline, K::kLognormal, Margin::kLow)) ==
        doctest::Approx(371.57579404247683).epsilon(1e-10));
  CHECK(expected_profit(1084, make_scenario(E::kRiskNeutral, K::kTruncatedNormal, Margin::kHigh)) ==
        doctest::Approx(9266.3432083920015).epsilon(1e-10));
}

TEST_CASE("expected profit agrees with a Monte Carlo estimate") {
  const auto sc = make_scenario(Experiment::kBaseline, DemandKind::kLognormal, Margin::kHigh);
  const auto seq = sample_sequence(sc.demand, 200000, 7);
  double sum = 0.0;
  for (int d : seq.draws) sum += profit(165, d, sc.costs);
  CHECK(sum / seq.draws.size() == doctest::Approx(expected_profit(165, sc)).epsilon(0.01));
}

TEST_CASE("the optimal quantity maximises expected profit on the integer grid") {
  for (auto e : {Experiment::kBaseline, Experiment::kRiskNeutral}) {
    for (auto k : {DemandKind::kUniform, DemandKind::kTruncatedNormal, DemandKind::kLognormal}) {
      for (auto m : {Margin::kHigh, Margin::kLow}) {
        const auto sc = make_scenario(e, k, m);
        int best = sc.demand.lower();
        double best_value = -1e300;
        for (int q = sc.demand.lower(); q <= sc.demand.upper(); ++q) {
          const double v = expected_profit(q, sc);
          if (v > best_value + 1e-9) {
            best_value = v;
            best = q;
          }
        }
        const int q_star = optimal_quantity(sc);
        CHECK(expected_profit(q_star, sc) >= best_value - 1e-9 * std::abs(best_value));
        CHECK(std::abs(q_star - best) <= (k == DemandKind::kUniform ? 0 : 1));
      }
    }
  }
}

TEST_CASE("sample_sequence is deterministic and stays on the support") {
  const auto u = DemandDistribution::uniform(1, 300);
  const auto a = sample_sequence(u, 15, 1234);
  const auto b = sample_sequence(u, 15, 1234);
  CHECK(a.draws == b.draws);
  CHECK(a.seed == 1234);
  CHECK(a.draws.size() == 15);
  CHECK(sample_sequence(u, 15, 1235).draws != a.draws);
  // Frozen draws guard against platform or library drift.
  CHECK(sample_sequence(u, 5, 42).draws == std::vector<int>{227, 192, 226, 41, 271});
  CHECK(sample_sequence(DemandDistribution::truncated_normal(1, 300), 5, 42).draws ==
        std::vector<int>{185, 168, 184, 96, 215});
  CHECK(sample_sequence(DemandDistribution::lognormal(1, 300), 5, 42).draws ==
        std::vector<int>{165, 157, 165, 127, 181});
  for (const auto& d : {u, DemandDistribution::truncated_normal(901, 1200), DemandDistribution::lognormal(1, 300)}) {
    for (int x : sample_sequence(d, 5000, 99).draws) {
      CHECK(x >= d.lower());
      CHECK(x <= d.upper());
    }
  }
  CHECK_THROWS(sample_sequence(u, 0, 1));
}

TEST_CASE("law of large numbers for the uniform sampler") {
  const auto seq = sample_sequence(DemandDistribution::uniform(1, 300), 100000, 2024);
  const double mean = std::accumulate(seq.draws.begin(), seq.draws.end(), 0.0) / seq.draws.size();
  CHECK(std::abs(mean - 150.5) / 150.5 < 0.01);
}

TEST_CASE("truncated normal draws rarely sit on the support edges") {
  const auto seq = sample_sequence(DemandDistribution::truncated_normal(1, 300), 100000, 77);
  const auto edge = std::count_if(seq.draws.begin(), seq.draws.end(), [](int d) { return d == 1 || d == 300; });
  CHECK(double(edge) / seq.draws.size() <= 0.003);
  const double mean = std::accumulate(seq.draws.begin(), seq.draws.end(), 0.0) / seq.draws.size();
  CHECK(mean == doctest::Approx(150.5).epsilon(0.01));
}

TEST_CASE("derive_seed separates repetitions and blocks") {
  CHECK(derive_seed(42, 0, 1) != derive_seed(42, 0, 2));
  CHECK(derive_seed(42, 0, 1) != derive_seed(42, 1, 1));
  CHECK(derive_seed(42, 3, 2) == derive_seed(42, 3, 2));
}

TEST_CASE("round_half_up") {
  CHECK(round_half_up(150.5) == 151);
  CHECK(round_half_up(150.49) == 150);
  CHECK(round_half_up(-0.5) == 0);
  CHECK(round_half_up(2.0) == 2);
}

TEST_CASE("scenario validation") {
  auto sc = make_scenario(Experiment::kBaseline, DemandKind::kUniform, Margin::kHigh);
  CHECK_NOTHROW(sc.validate());
  sc.margin = Margin::kLow;
  CHECK_THROWS_AS(sc.validate(), InvalidScenarioError);
  sc = make_scenario(Experiment::kRiskNeutral, DemandKind::kUniform, Margin::kLow);
  CHECK(sc.demand.lower() == 901);
  CHECK(sc.demand.upper() == 1200);
  CHECK(sc.costs.cost == 9.0);
  CHECK_THROWS_AS(DemandDistribution::uniform(5, 5), InvalidScenarioError);
  CHECK_THROWS(make_scenario(Experiment::kBaseline, DemandKind::kUniform, Margin::kHigh, 0).validate());
}

TEST_CASE("names round-trip") {
  for (auto k : {DemandKind::kUniform, DemandKind::kTruncatedNormal, DemandKind::kLognormal}) {
    CHECK(demand_kind_from_string(to_string(k)) == k);
  }
  for (auto e : {Experiment::kBaseline, Experiment::kFormula, Experiment::kRiskNeutral}) {
    CHECK(experiment_from_string(to_string(e)) == e);
  }
  CHECK(margin_from_string("low") == Margin::kLow);
  CHECK_THROWS(demand_kind_from_string("pareto"));
}

}

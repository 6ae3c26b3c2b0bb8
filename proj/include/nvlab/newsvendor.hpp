#pragma once

// Newsvendor economics and demand distributions.
//
// Demand and orders are integers. A continuous demand law (truncated normal,
// truncated lognormal) is turned into an integer demand by rounding a draw to
// the nearest integer, so the integer CDF is P(D <= q) = G(q + 0.5) where G
// is the continuous CDF truncated to [a, b]. Uniform demand is the discrete
// uniform law on {a..b}.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nvlab {

struct CostStructure {
  double price = 12.0;
  double cost = 3.0;
  double salvage = 0.0;

  // Throws InvalidScenarioError unless 0 < cost < price and salvage == 0.
  void validate() const;
  bool operator==(const CostStructure&) const = default;
};

enum class DemandKind { kUniform, kTruncatedNormal, kLognormal };

std::string_view to_string(DemandKind kind);
DemandKind demand_kind_from_string(std::string_view name);

class DemandDistribution {
 public:
  // Discrete uniform on {lower..upper}.
  static DemandDistribution uniform(int lower, int upper);
  // Normal with mean (a+b)/2 and sd (b-a)/6, truncated to [a, b].
  static DemandDistribution truncated_normal(int lower, int upper);
  static DemandDistribution truncated_normal(int lower, int upper, double mu, double sigma);
  // Lognormal whose 0.25/0.75 quantiles are 135/165 on [1, 300]. On other
  // supports the same law is shifted by (a - 1), truncated to [a, b].
  static DemandDistribution lognormal(int lower, int upper);
  static DemandDistribution lognormal(int lower, int upper, double log_mean, double log_sd);

  DemandKind kind() const { return kind_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }
  // Location/scale parameters: (mu_N, sigma_N) for the normal, (mu_L, sigma_L)
  // of ln-demand for the lognormal, unused for uniform.
  double location() const { return location_; }
  double scale() const { return scale_; }

  // Continuous CDF of the truncated law. Uniform is represented by the
  // continuous uniform on [a - 0.5, b + 0.5] so rounding a draw gives the
  // discrete uniform on {a..b}.
  double cdf(double x) const;
  // Inverse of cdf() on (0, 1).
  double quantile(double probability) const;
  // Mean of the law; this is the anchor A used by the anchoring metrics.
  double mean() const;

  // P(D <= q) for the integer demand D.
  double discrete_cdf(int q) const;
  // P(D = d) for the integer demand D; zero outside [a, b].
  double pmf(int d) const;

  bool operator==(const DemandDistribution&) const = default;

 private:
  DemandDistribution(DemandKind kind, int lower, int upper, double location, double scale);
  double untruncated_cdf(double x) const;

  DemandKind kind_;
  int lower_;
  int upper_;
  double location_;
  double scale_;
  double offset_ = 0.0;      // lognormal shift, a - 1
  double mass_below_ = 0.0;  // untruncated CDF at a
  double mass_kept_ = 1.0;   // untruncated CDF(b) - CDF(a)
};

enum class Experiment { kBaseline, kFormula, kRiskNeutral };
enum class Margin { kHigh, kLow };

std::string_view to_string(Experiment experiment);
std::string_view to_string(Margin margin);
Experiment experiment_from_string(std::string_view name);
Margin margin_from_string(std::string_view name);

struct ScenarioConfig {
  CostStructure costs;
  DemandDistribution demand = DemandDistribution::uniform(1, 300);
  Experiment experiment = Experiment::kBaseline;
  Margin margin = Margin::kHigh;
  int rounds = 15;

  // Checks cost validity, margin/fractile agreement and round count.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

// Default lognormal parameters (of ln-demand) for the [1, 300] support.
inline constexpr double kDefaultLogMean = 5.005610126169505;
inline constexpr double kDefaultLogSd = 0.14875740914062366;

// Builds one standard scenario: p = 12, c = 3 (high) or 9 (low), demand
// on [1, 300] or [901, 1200] for the risk-neutral experiment.
ScenarioConfig make_scenario(Experiment experiment, DemandKind kind, Margin margin, int rounds = 15);

struct DemandSequence {
  std::uint64_t seed = 0;
  std::vector<int> draws;
};

// p * min(q, d) - c * q. Throws InvalidScenarioError on negative inputs.
double profit(int order, int demand, const CostStructure& costs);

// (p - c) / p. Throws InvalidScenarioError unless 0 < c < p.
double critical_fractile(const CostStructure& costs);

// Uniform: smallest q in {a..b} with P(D <= q) >= eta.
// Continuous kinds: continuous quantile at eta rounded to nearest, clipped.
int optimal_quantity(const ScenarioConfig& scenario);

// Exact expectation of profit(q, D) over the integer demand support.
// Accepts a fractional q so mean orders can be evaluated directly.
double expected_profit(double order, const ScenarioConfig& scenario);

// P(D <= q) under the integer demand law.
double discretize_cdf(const DemandDistribution& dist, int q);

// Deterministic integer demand draws on [a, b]. Uses mt19937_64 and a
// hand-rolled 53-bit uniform so the sequence is identical across platforms.
DemandSequence sample_sequence(const DemandDistribution& dist, int rounds, std::uint64_t seed);

// Mixes a base seed with a (repetition, block) pair.
std::uint64_t derive_seed(std::uint64_t base_seed, int repetition, int block);

// Round half up (toward +inf) for order arithmetic.
int round_half_up(double value);

}  // namespace nvlab

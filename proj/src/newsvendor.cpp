#include "nvlab/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "nvlab/error.hpp"

namespace nvlab {
namespace {

const boost::math::normal& standard_normal() {
  static const boost::math::normal kNormal(0.0, 1.0);
  return kNormal;
}

double phi_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return boost::math::cdf(standard_normal(), z);
}

double phi_quantile(double p) { return boost::math::quantile(standard_normal(), p); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void CostStructure::validate() const {
  if (!(price > 0.0)) throw InvalidScenarioError("price must be positive");
  if (!(cost > 0.0) || !(cost < price)) {
    throw InvalidScenarioError("cost must satisfy 0 < c < p");
  }
  if (salvage != 0.0) throw InvalidScenarioError("salvage value must be 0");
}

std::string_view to_string(DemandKind kind) {
  switch (kind) {
    case DemandKind::kUniform: return "uniform";
    case DemandKind::kTruncatedNormal: return "normal";
    case DemandKind::kLognormal: return "lognormal";
  }
  return "?";
}

DemandKind demand_kind_from_string(std::string_view name) {
  if (name == "uniform") return DemandKind::kUniform;
  if (name == "normal" || name == "truncated-normal") return DemandKind::kTruncatedNormal;
  if (name == "lognormal") return DemandKind::kLognormal;
  throw InvalidScenarioError("unknown demand distribution '" + std::string(name) + "'");
}

DemandDistribution::DemandDistribution(DemandKind kind, int lower, int upper, double location,
                                       double scale)
    : kind_(kind), lower_(lower), upper_(upper), location_(location), scale_(scale) {
  if (lower < 0 || lower >= upper) throw InvalidScenarioError("demand support needs 0 <= a < b");
  if (kind != DemandKind::kUniform && !(scale > 0.0)) {
    throw InvalidScenarioError("demand scale must be positive");
  }
  if (kind == DemandKind::kLognormal) offset_ = lower - 1;
  if (kind != DemandKind::kUniform) {
    mass_below_ = untruncated_cdf(lower);
    mass_kept_ = untruncated_cdf(upper) - mass_below_;
    if (!(mass_kept_ > 0.0)) throw InvalidScenarioError("demand law has no mass on [a, b]");
  }
}

DemandDistribution DemandDistribution::uniform(int lower, int upper) {
  return DemandDistribution(DemandKind::kUniform, lower, upper, 0.0, 0.0);
}

DemandDistribution DemandDistribution::truncated_normal(int lower, int upper) {
  return truncated_normal(lower, upper, (lower + upper) / 2.0, (upper - lower) / 6.0);
}

DemandDistribution DemandDistribution::truncated_normal(int lower, int upper, double mu,
                                                        double sigma) {
  return DemandDistribution(DemandKind::kTruncatedNormal, lower, upper, mu, sigma);
}

DemandDistribution DemandDistribution::lognormal(int lower, int upper) {
  return lognormal(lower, upper, kDefaultLogMean, kDefaultLogSd);
}

DemandDistribution DemandDistribution::lognormal(int lower, int upper, double log_mean,
                                                 double log_sd) {
  return DemandDistribution(DemandKind::kLognormal, lower, upper, log_mean, log_sd);
}

double DemandDistribution::untruncated_cdf(double x) const {
  switch (kind_) {
    case DemandKind::kUniform: {
      const double lo = lower_ - 0.5;
      const double width = upper_ - lower_ + 1.0;
      return std::clamp((x - lo) / width, 0.0, 1.0);
    }
    case DemandKind::kTruncatedNormal:
      return phi_cdf((x - location_) / scale_);
    case DemandKind::kLognormal: {
      const double shifted = x - offset_;
      if (shifted <= 0.0) return 0.0;
      return phi_cdf((std::log(shifted) - location_) / scale_);
    }
  }
  return 0.0;
}

double DemandDistribution::cdf(double x) const {
  if (kind_ == DemandKind::kUniform) return untruncated_cdf(x);
  if (x <= lower_) return 0.0;
  if (x >= upper_) return 1.0;
  return std::clamp((untruncated_cdf(x) - mass_below_) / mass_kept_, 0.0, 1.0);
}

double DemandDistribution::quantile(double probability) const {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw InvalidScenarioError("quantile probability must lie in (0, 1)");
  }
  switch (kind_) {
    case DemandKind::kUniform:
      return lower_ - 0.5 + probability * (upper_ - lower_ + 1.0);
    case DemandKind::kTruncatedNormal: {
      const double x = location_ + scale_ * phi_quantile(mass_below_ + probability * mass_kept_);
      return std::clamp(x, double(lower_), double(upper_));
    }
    case DemandKind::kLognormal: {
      const double z = phi_quantile(mass_below_ + probability * mass_kept_);
      const double x = offset_ + std::exp(location_ + scale_ * z);
      return std::clamp(x, double(lower_), double(upper_));
    }
  }
  return lower_;
}

double DemandDistribution::mean() const {
  switch (kind_) {
    case DemandKind::kUniform:
      return (lower_ + upper_) / 2.0;
    case DemandKind::kTruncatedNormal: {
      const auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
      const double za = (lower_ - location_) / scale_;
      const double zb = (upper_ - location_) / scale_;
      return location_ + scale_ * (pdf(za) - pdf(zb)) / mass_kept_;
    }
    case DemandKind::kLognormal: {
      const double s2 = scale_ * scale_;
      const double la = lower_ - offset_;
      const double lb = upper_ - offset_;
      const double partial = phi_cdf((std::log(lb) - location_ - s2) / scale_) -
                             phi_cdf((std::log(la) - location_ - s2) / scale_);
      return offset_ + std::exp(location_ + s2 / 2.0) * partial / mass_kept_;
    }
  }
  return 0.0;
}

double DemandDistribution::discrete_cdf(int q) const {
  if (q < lower_) return 0.0;
  if (q >= upper_) return 1.0;
  if (kind_ == DemandKind::kUniform) {
    return double(q - lower_ + 1) / double(upper_ - lower_ + 1);
  }
  return cdf(q + 0.5);
}

double DemandDistribution::pmf(int d) const {
  if (d < lower_ || d > upper_) return 0.0;
  if (kind_ == DemandKind::kUniform) return 1.0 / double(upper_ - lower_ + 1);
  return discrete_cdf(d) - discrete_cdf(d - 1);
}

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::kBaseline: return "E1";
    case Experiment::kFormula: return "E2";
    case Experiment::kRiskNeutral: return "E3";
  }
  return "?";
}

std::string_view to_string(Margin margin) { return margin == Margin::kHigh ? "high" : "low"; }

Experiment experiment_from_string(std::string_view name) {
  if (name == "E1" || name == "E1-baseline" || name == "baseline") return Experiment::kBaseline;
  if (name == "E2" || name == "E2-formula" || name == "formula") return Experiment::kFormula;
  if (name == "E3" || name == "E3-risk-neutral" || name == "risk-neutral") {
    return Experiment::kRiskNeutral;
  }
  throw InvalidScenarioError("unknown experiment '" + std::string(name) + "'");
}

Margin margin_from_string(std::string_view name) {
  if (name == "high") return Margin::kHigh;
  if (name == "low") return Margin::kLow;
  throw InvalidScenarioError("unknown margin '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  costs.validate();
  const bool high = critical_fractile(costs) >= 0.5;
  if (high != (margin == Margin::kHigh)) {
    throw InvalidScenarioError("margin label disagrees with the critical fractile");
  }
  if (rounds < 1) throw InvalidScenarioError("rounds must be at least 1");
}

ScenarioConfig make_scenario(Experiment experiment, DemandKind kind, Margin margin, int rounds) {
  const bool shifted = experiment == Experiment::kRiskNeutral;
  const int a = shifted ? 901 : 1;
  const int b = shifted ? 1200 : 300;
  ScenarioConfig sc;
  sc.costs = CostStructure{12.0, margin == Margin::kHigh ? 3.0 : 9.0, 0.0};
  switch (kind) {
    case DemandKind::kUniform: sc.demand = DemandDistribution::uniform(a, b); break;
    case DemandKind::kTruncatedNormal: sc.demand = DemandDistribution::truncated_normal(a, b); break;
    case DemandKind::kLognormal: sc.demand = DemandDistribution::lognormal(a, b); break;
  }
  sc.experiment = experiment;
  sc.margin = margin;
  sc.rounds = rounds;
  return sc;
}

double profit(int order, int demand, const CostStructure& costs) {
  if (order < 0 || demand < 0) throw InvalidScenarioError("order and demand must be nonnegative");
  return costs.price * std::min(order, demand) - costs.cost * order;
}

double critical_fractile(const CostStructure& costs) {
  if (!(costs.cost > 0.0) || !(costs.cost < costs.price)) {
    throw InvalidScenarioError("critical fractile needs 0 < c < p");
  }
  return (costs.price - costs.cost) / costs.price;
}

int optimal_quantity(const ScenarioConfig& scenario) {
  const double eta = critical_fractile(scenario.costs);
  const auto& dist = scenario.demand;
  if (dist.kind() == DemandKind::kUniform) {
    // Binary search for the smallest q with F(q) >= eta.
    int lo = dist.lower();
    int hi = dist.upper();
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (dist.discrete_cdf(mid) >= eta) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }
  const int q = round_half_up(dist.quantile(eta));
  return std::clamp(q, dist.lower(), dist.upper());
}

double expected_profit(double order, const ScenarioConfig& scenario) {
  const auto& dist = scenario.demand;
  const double p = scenario.costs.price;
  const double c = scenario.costs.cost;
  double total = 0.0;
  for (int d = dist.lower(); d <= dist.upper(); ++d) {
    total += dist.pmf(d) * (p * std::min(order, double(d)) - c * order);
  }
  return total;
}

double discretize_cdf(const DemandDistribution& dist, int q) { return dist.discrete_cdf(q); }

DemandSequence sample_sequence(const DemandDistribution& dist, int rounds, std::uint64_t seed) {
  if (rounds < 1) throw InvalidScenarioError("rounds must be at least 1");
  DemandSequence seq;
  seq.seed = seed;
  seq.draws.reserve(rounds);
  std::mt19937_64 engine(seed);
  for (int i = 0; i < rounds; ++i) {
    // Midpoint of one of 2^53 equal cells, strictly inside (0, 1).
    const double u = (double(engine() >> 11) + 0.5) * 0x1.0p-53;
    const int d = int(std::floor(dist.quantile(u) + 0.5));
    seq.draws.push_back(std::clamp(d, dist.lower(), dist.upper()));
  }
  return seq;
}

std::uint64_t derive_seed(std::uint64_t base_seed, int repetition, int block) {
  const std::uint64_t key = (std::uint64_t(std::uint32_t(repetition)) << 32) |
                            std::uint64_t(std::uint32_t(block));
  return base_seed ^ splitmix64(key);
}

int round_half_up(double value) { return int(std::floor(value + 0.5)); }

}  // namespace nvlab

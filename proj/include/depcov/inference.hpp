#pragma once

#include "depcov/dcov.hpp"
#include "depcov/norms.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace depcov {

enum class StatisticKind { v, r };

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(const std::string& name);

inline constexpr std::size_t kDefaultReplicates = 999;
inline constexpr double kDefaultAlpha = 0.05;

/// V_n or R_n of the sample with ys re-paired through a permutation. The
/// marginal distance matrices, and therefore v_xx, v_yy and t2, are computed
/// once; only t1 and t3 depend on the pairing.
class PermutationStatistic {
 public:
  PermutationStatistic(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y, StatisticKind kind);

  std::size_t size() const noexcept { return dx_.size(); }
  StatisticKind kind() const noexcept { return kind_; }
  double v_xx() const noexcept { return v_xx_; }
  double v_yy() const noexcept { return v_yy_; }

  /// perm[k] is the y-index paired with x-index k.
  double evaluate(std::span<const std::size_t> perm) const;
  double observed() const;

 private:
  DistanceMatrix dx_;
  DistanceMatrix dy_;
  std::vector<double> rx_;
  std::vector<double> ry_;
  double t2_ = 0.0;
  double v_xx_ = 0.0;
  double v_yy_ = 0.0;
  StatisticKind kind_;
};

struct PermutationTestResult {
  double observed = 0.0;
  std::vector<double> replicates;
  double p_value = 1.0;
  std::size_t b = 0;
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::v;
};

/// p = (1 + #{replicate >= observed}) / (B + 1). Replicate b uses the
/// permutation drawn from stream (seed, b).
PermutationTestResult permutation_test(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y,
                                       std::size_t b, StatisticKind kind, std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Clopper-Pearson interval for a binomial proportion.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double level = 0.95);

/// Equal-tailed central range [lo, hi] of rejection counts for
/// Binomial(trials, p) with tail mass at most (1 - level)/2 on each side.
Interval binomial_count_range(std::size_t trials, double p, double level = 0.99);

enum class ScenarioKind { independent, identity, single_coordinate, finite_dependence };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::independent;
  std::size_t dim = 5;
  std::size_t dependent_coordinate = 0;  // single_coordinate only
  std::size_t shared_dim = 0;            // finite_dependence only
  double noise_sd = 1.0;
};

/// Human-readable account of which coordinates carry the dependence.
std::string dependence_structure(const ScenarioConfig& cfg);

PairedSample generate_scenario(const ScenarioConfig& cfg, std::size_t n, std::uint64_t seed, std::uint64_t replication);

struct NormPair {
  std::string label;
  NormSpec x;
  NormSpec y;
};

struct PowerStudyConfig {
  ScenarioConfig scenario;
  std::vector<NormPair> norms;
  std::size_t n = 100;
  std::size_t b = kDefaultReplicates;
  std::size_t replications = 100;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::r;
  double confidence = 0.95;
};

struct PowerRow {
  std::string label;
  std::size_t rejections = 0;
  double rate = 0.0;
  Interval ci;
};

struct PowerStudyReport {
  PowerStudyConfig config;
  std::string structure;
  std::vector<PowerRow> rows;
};

/// Every norm pair sees the same datasets and the same permutations.
PowerStudyReport power_study(const PowerStudyConfig& config);

}  // namespace depcov

#include "depcov/inference.hpp"

#include "depcov/error.hpp"
#include "depcov/exact_sum.hpp"
#include "depcov/hilbert.hpp"
#include "depcov/parallel.hpp"
#include "depcov/random.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace depcov {

std::string to_string(StatisticKind kind) { return kind == StatisticKind::v ? "v" : "r"; }

StatisticKind parse_statistic_kind(const std::string& name) {
  if (name == "v" || name == "V") return StatisticKind::v;
  if (name == "r" || name == "R") return StatisticKind::r;
  fail(Errc::bad_config, "statistic must be 'v' or 'r', got '" + name + "'");
}

PermutationStatistic::PermutationStatistic(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y,
                                           StatisticKind kind)
    : dx_(pairwise_distance_matrix(sample.xs, spec_x)),
      dy_(pairwise_distance_matrix(sample.ys, spec_y)),
      kind_(kind) {
  const std::size_t n = dx_.size();
  rx_.resize(n);
  ry_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    rx_[k] = exact_sum(dx_.row(k));
    ry_[k] = exact_sum(dy_.row(k));
  }
  const double nn = static_cast<double>(n);
  t2_ = (exact_sum(rx_) / (nn * nn)) * (exact_sum(ry_) / (nn * nn));
  v_xx_ = combine(terms(dx_, dx_));
  v_yy_ = combine(terms(dy_, dy_));
}

double PermutationStatistic::evaluate(std::span<const std::size_t> perm) const {
  const std::size_t n = dx_.size();
  if (perm.size() != n) fail(Errc::size_mismatch, "permutation length does not match the sample");
  std::vector<double> cross(n);
  ExactSum row;
  for (std::size_t k = 0; k < n; ++k) {
    row.clear();
    const auto drow = dx_.row(k);
    const auto yrow = dy_.row(perm[k]);
    for (std::size_t l = 0; l < n; ++l) row.add(drow[l] * yrow[perm[l]]);
    cross[k] = row.result();
  }
  ExactSum t3;
  for (std::size_t k = 0; k < n; ++k) t3.add(rx_[k] * ry_[perm[k]]);

  const double nn = static_cast<double>(n);
  const DcovTerms t{exact_sum(cross) / (nn * nn), t2_, t3.result() / (nn * nn * nn)};
  const double v = combine(t);
  if (kind_ == StatisticKind::v) return v;
  return correlation(v, v_xx_, v_yy_, term_scale(t));
}

double PermutationStatistic::observed() const {
  std::vector<std::size_t> identity(dx_.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return evaluate(identity);
}

PermutationTestResult permutation_test(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y,
                                       std::size_t b, StatisticKind kind, std::uint64_t seed) {
  if (b == 0) fail(Errc::bad_replicate_count, "need at least one permutation replicate");
  if (sample.size() == 0) fail(Errc::empty_input, "empty sample");
  const PermutationStatistic stat(sample, spec_x, spec_y, kind);

  PermutationTestResult out;
  out.b = b;
  out.seed = seed;
  out.kind = kind;
  out.observed = stat.observed();
  out.replicates.resize(b);
  parallel_for(b, [&](std::size_t i) {
    Engine engine = stream(seed, "permutation", i);
    const auto perm = random_permutation(stat.size(), engine);
    out.replicates[i] = stat.evaluate(perm);
  });
  const auto exceed = std::count_if(out.replicates.begin(), out.replicates.end(),
                                    [&](double r) { return r >= out.observed; });
  out.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(b) + 1.0);
  return out;
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0 || successes > trials || !(level > 0.0 && level < 1.0)) {
    fail(Errc::bad_config, "invalid binomial interval request");
  }
  const double tail = 0.5 * (1.0 - level);
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval ci{0.0, 1.0};
  if (successes > 0) ci.lo = boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0), tail);
  if (successes < trials) ci.hi = boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k), 1.0 - tail);
  return ci;
}

Interval binomial_count_range(std::size_t trials, double p, double level) {
  if (trials == 0 || !(p > 0.0 && p < 1.0) || !(level > 0.0 && level < 1.0)) {
    fail(Errc::bad_config, "invalid binomial range request");
  }
  const boost::math::binomial_distribution<double> dist(static_cast<double>(trials), p);
  const double tail = 0.5 * (1.0 - level);
  // smallest lo with P(X < lo) <= tail, largest hi with P(X > hi) <= tail
  std::size_t lo = 0;
  while (lo < trials && boost::math::cdf(dist, static_cast<double>(lo)) <= tail) ++lo;
  std::size_t hi = trials;
  while (hi > 0 && boost::math::cdf(boost::math::complement(dist, static_cast<double>(hi - 1))) <= tail) --hi;
  return {static_cast<double>(lo), static_cast<double>(hi)};
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::independent: return "independent";
    case ScenarioKind::identity: return "identity";
    case ScenarioKind::single_coordinate: return "single_coordinate";
    case ScenarioKind::finite_dependence: return "finite_dependence";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "independent") return ScenarioKind::independent;
  if (name == "identity") return ScenarioKind::identity;
  if (name == "single_coordinate") return ScenarioKind::single_coordinate;
  if (name == "finite_dependence") return ScenarioKind::finite_dependence;
  fail(Errc::bad_config, "unknown scenario '" + name + "'");
}

namespace {

void check_scenario(const ScenarioConfig& cfg) {
  if (cfg.dim == 0) fail(Errc::bad_config, "scenario dimension must be positive");
  if (cfg.kind == ScenarioKind::single_coordinate && cfg.dependent_coordinate >= cfg.dim) {
    fail(Errc::bad_config, "dependent coordinate outside the dimension");
  }
  if (cfg.kind == ScenarioKind::finite_dependence && cfg.shared_dim > cfg.dim) {
    fail(Errc::bad_config, "shared dimension exceeds the dimension");
  }
  if (!(cfg.noise_sd >= 0.0)) fail(Errc::bad_config, "noise standard deviation must be nonnegative");
}

}  // namespace

std::string dependence_structure(const ScenarioConfig& cfg) {
  const std::string d = std::to_string(cfg.dim);
  switch (cfg.kind) {
    case ScenarioKind::independent:
      return "X, Y independent standard normal in R^" + d + "; no coordinate is dependent";
    case ScenarioKind::identity:
      return "Y = X, standard normal in R^" + d + "; every coordinate is dependent";
    case ScenarioKind::single_coordinate:
      return "X, Y standard normal in R^" + d + "; only coordinate " + std::to_string(cfg.dependent_coordinate + 1) +
             " is dependent (Y_c = X_c + noise_sd * e)";
    case ScenarioKind::finite_dependence:
      return "coefficient vectors in R^" + d + " with lambda_i = 2^-i; coordinates 1.." +
             std::to_string(cfg.shared_dim) + " share latent Z (Y_i = lambda_i (Z_i + noise_sd * e_i)), the rest are "
             "independent";
  }
  return {};
}

PairedSample generate_scenario(const ScenarioConfig& cfg, std::size_t n, std::uint64_t seed, std::uint64_t replication) {
  check_scenario(cfg);
  if (n == 0) fail(Errc::bad_config, "sample size must be positive");
  const std::uint64_t data_seed = stream(seed, "scenario", replication)();
  if (cfg.kind == ScenarioKind::finite_dependence) {
    FiniteDependenceConfig fd;
    fd.shared_dim = cfg.shared_dim;
    fd.lambdas = geometric_lambdas(0.5, cfg.dim);
    fd.noise_sd = cfg.noise_sd;
    return finite_dependence_sample(fd, n, data_seed);
  }

  const auto rows = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  PointMatrix xs(rows, d);
  PointMatrix ys(rows, d);
  for (Eigen::Index j = 0; j < rows; ++j) {
    Engine engine = stream(data_seed, "observation", static_cast<std::uint64_t>(j));
    for (Eigen::Index i = 0; i < d; ++i) xs(j, i) = standard_normal(engine);
    for (Eigen::Index i = 0; i < d; ++i) {
      switch (cfg.kind) {
        case ScenarioKind::identity:
          ys(j, i) = xs(j, i);
          break;
        case ScenarioKind::single_coordinate:
          ys(j, i) = static_cast<std::size_t>(i) == cfg.dependent_coordinate
                         ? xs(j, i) + cfg.noise_sd * standard_normal(engine)
                         : standard_normal(engine);
          break;
        default:
          ys(j, i) = standard_normal(engine);
          break;
      }
    }
  }
  return PairedSample(std::move(xs), std::move(ys));
}

PowerStudyReport power_study(const PowerStudyConfig& config) {
  check_scenario(config.scenario);
  if (config.norms.empty()) fail(Errc::bad_config, "power study needs at least one norm pair");
  if (config.replications == 0) fail(Errc::bad_config, "replications must be positive");
  if (config.b == 0) fail(Errc::bad_replicate_count, "need at least one permutation replicate");
  if (config.n == 0) fail(Errc::bad_config, "sample size must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(Errc::bad_config, "alpha must lie in (0, 1)");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) fail(Errc::bad_config, "confidence must lie in (0, 1)");
  for (const auto& pair : config.norms) {
    if (pair.x.dim() != config.scenario.dim || pair.y.dim() != config.scenario.dim) {
      fail(Errc::dimension_mismatch, "norm pair '" + pair.label + "' does not match scenario dimension " +
                                         std::to_string(config.scenario.dim));
    }
  }

  const std::size_t pairs = config.norms.size();
  std::vector<unsigned char> rejected(config.replications * pairs, 0);
  parallel_for(config.replications, [&](std::size_t rep) {
    const PairedSample sample = generate_scenario(config.scenario, config.n, config.seed, rep);
    const std::uint64_t perm_seed = stream(config.seed, "power-permutations", rep)();
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto& pair = config.norms[k];
      const auto test = permutation_test(sample, pair.x, pair.y, config.b, config.kind, perm_seed);
      rejected[rep * pairs + k] = test.p_value <= config.alpha ? 1 : 0;
    }
  });

  PowerStudyReport report;
  report.config = config;
  report.structure = dependence_structure(config.scenario);
  for (std::size_t k = 0; k < pairs; ++k) {
    PowerRow row;
    row.label = config.norms[k].label;
    for (std::size_t rep = 0; rep < config.replications; ++rep) row.rejections += rejected[rep * pairs + k];
    row.rate = static_cast<double>(row.rejections) / static_cast<double>(config.replications);
    row.ci = clopper_pearson(row.rejections, config.replications, config.confidence);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace depcov

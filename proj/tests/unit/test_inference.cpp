#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/oracles.hpp"
#include "depcov/error.hpp"
#include "depcov/inference.hpp"
#include "depcov/parallel.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace depcov;
using depcov::testing::random_points;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::bad_config;
}

const NormSpec e1 = NormSpec::euclidean(1);

}  // namespace

TEST_CASE("permutation statistic matches a direct recomputation") {
  Engine engine = stream(1, "perm-stat", 0);
  const PairedSample s(random_points(25, 2, engine), random_points(25, 3, engine));
  const NormSpec sx = NormSpec::euclidean(2), sy = NormSpec::weighted(depcov::testing::random_spd(3, engine));
  const PermutationStatistic v(s, sx, sy, StatisticKind::v);
  const PermutationStatistic r(s, sx, sy, StatisticKind::r);
  const DcovEstimate direct = r_n(s, sx, sy);
  CHECK(v.observed() == direct.v_xy);
  CHECK(r.observed() == direct.r);
  for (int trial = 0; trial < 10; ++trial) {
    const auto perm = random_permutation(25, engine);
    PointMatrix py(25, 3);
    for (Eigen::Index k = 0; k < 25; ++k) py.row(k) = s.ys.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(k)]));
    const DcovEstimate e = r_n(PairedSample(s.xs, py), sx, sy);
    CHECK(v.evaluate(perm) == e.v_xy);
    CHECK(r.evaluate(perm) == e.r);
  }
}

TEST_CASE("permutation test examples") {
  SUBCASE("constant xs") {
    Engine engine = stream(2, "const", 0);
    const PairedSample s(PointMatrix::Constant(20, 1, 3.0), random_points(20, 1, engine));
    const auto res = permutation_test(s, e1, e1, 99, StatisticKind::r, 5);
    CHECK(res.observed == 0.0);
    CHECK(res.p_value == 1.0);
  }
  SUBCASE("Y = X") {
    Engine engine = stream(3, "identity", 0);
    const PointMatrix xs = random_points(50, 1, engine);
    const auto res = permutation_test(PairedSample(xs, xs), e1, e1, 199, StatisticKind::v, 42);
    CHECK(res.p_value == doctest::Approx(1.0 / 200).epsilon(1e-15));
  }
  SUBCASE("B = 1") {
    Engine engine = stream(4, "b1", 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const PairedSample s(random_points(10, 1, engine), random_points(10, 1, engine));
      const double p = permutation_test(s, e1, e1, 1, StatisticKind::v, seed).p_value;
      CHECK((p == 0.5 || p == 1.0));
    }
  }
  SUBCASE("B = 0") {
    const PairedSample s(PointMatrix::Zero(3, 1), PointMatrix::Zero(3, 1));
    CHECK(error_of([&] { permutation_test(s, e1, e1, 0, StatisticKind::v, 1); }) == Errc::bad_replicate_count);
  }
}

TEST_CASE("p-value counts replicates at or above the observed value") {
  Engine engine = stream(5, "count", 0);
  const PairedSample s(random_points(30, 2, engine), random_points(30, 2, engine));
  const auto res = permutation_test(s, NormSpec::euclidean(2), NormSpec::euclidean(2), 299, StatisticKind::r, 7);
  const auto hits = std::count_if(res.replicates.begin(), res.replicates.end(), [&](double x) { return x >= res.observed; });
  CHECK(res.p_value == static_cast<double>(1 + hits) / 300.0);
  CHECK(res.replicates.size() == 299);
}

TEST_CASE("p-values are reproducible and thread-count independent") {
  Engine engine = stream(6, "det", 0);
  const PairedSample s(random_points(60, 3, engine), random_points(60, 2, engine));
  set_thread_limit(1);
  const auto a = permutation_test(s, NormSpec::euclidean(3), NormSpec::euclidean(2), 199, StatisticKind::r, 11);
  set_thread_limit(6);
  const auto b = permutation_test(s, NormSpec::euclidean(3), NormSpec::euclidean(2), 199, StatisticKind::r, 11);
  reset_thread_limit();
  CHECK(a.replicates == b.replicates);
  CHECK(a.p_value == b.p_value);
}

TEST_CASE("V and R tests agree and are scale invariant") {
  Engine engine = stream(7, "v-vs-r", 0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PointMatrix xs = random_points(40, 2, engine);
    PointMatrix ys = random_points(40, 1, engine);
    ys.col(0) += 0.3 * xs.col(0);
    const PairedSample s(xs, ys);
    const NormSpec e2 = NormSpec::euclidean(2);
    const double pv = permutation_test(s, e2, e1, 199, StatisticKind::v, seed).p_value;
    const double pr = permutation_test(s, e2, e1, 199, StatisticKind::r, seed).p_value;
    CHECK(pv == pr);
    const PairedSample scaled(xs * 8.0, ys * 0.25);
    CHECK(permutation_test(scaled, e2, e1, 199, StatisticKind::r, seed).p_value == pr);
  }
}

TEST_CASE("binomial helpers") {
  const Interval ci = clopper_pearson(0, 10, 0.95);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-12));
  const Interval all = clopper_pearson(10, 10, 0.95);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-12));
  const Interval mid = clopper_pearson(50, 100, 0.95);
  CHECK(mid.lo < 0.5);
  CHECK(mid.hi > 0.5);
  CHECK(mid.lo == doctest::Approx(1 - mid.hi).epsilon(1e-12));

  // Binomial(1000, 0.05) has mean 50 and sd about 6.9
  const Interval range = binomial_count_range(1000, 0.05, 0.99);
  CHECK(range.lo >= 30);
  CHECK(range.lo <= 34);
  CHECK(range.hi >= 66);
  CHECK(range.hi <= 70);
}

TEST_CASE("scenarios") {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::identity;
  cfg.dim = 3;
  const PairedSample a = generate_scenario(cfg, 20, 1, 0);
  CHECK(a.xs == a.ys);
  CHECK(generate_scenario(cfg, 20, 1, 0).xs == a.xs);
  CHECK(generate_scenario(cfg, 20, 1, 1).xs != a.xs);

  cfg.kind = ScenarioKind::single_coordinate;
  cfg.dependent_coordinate = 2;
  cfg.noise_sd = 0.0;
  const PairedSample b = generate_scenario(cfg, 20, 1, 0);
  CHECK(b.xs.col(2) == b.ys.col(2));
  CHECK(b.xs.col(0) != b.ys.col(0));
  CHECK_FALSE(dependence_structure(cfg).empty());

  CHECK(parse_scenario_kind(to_string(ScenarioKind::finite_dependence)) == ScenarioKind::finite_dependence);
  CHECK(parse_statistic_kind("r") == StatisticKind::r);
  CHECK(error_of([] { parse_statistic_kind("w"); }) == Errc::bad_config);
}

TEST_CASE("power study") {
  PowerStudyConfig cfg;
  cfg.scenario.kind = ScenarioKind::single_coordinate;
  cfg.scenario.dim = 5;
  cfg.scenario.dependent_coordinate = 0;
  Matrix emphasis = Matrix::Identity(5, 5);
  emphasis(0, 0) = 25.0;
  cfg.norms = {{"euclidean", NormSpec::euclidean(5), NormSpec::euclidean(5)},
               {"emphasis", NormSpec::weighted(emphasis), NormSpec::weighted(emphasis)}};
  cfg.n = 30;
  cfg.b = 99;
  cfg.replications = 40;
  cfg.seed = 3;
  const PowerStudyReport rep = power_study(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].rate >= rep.rows[0].rate);
  for (const auto& row : rep.rows) {
    CHECK(row.rate == static_cast<double>(row.rejections) / 40.0);
    CHECK(row.ci.lo <= row.rate);
    CHECK(row.ci.hi >= row.rate);
  }
  const PowerStudyReport again = power_study(cfg);
  CHECK(again.rows[0].rejections == rep.rows[0].rejections);
  CHECK(again.rows[1].rejections == rep.rows[1].rejections);
}

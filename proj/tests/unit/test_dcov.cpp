#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/oracles.hpp"
#include "depcov/dcov.hpp"
#include "depcov/error.hpp"
#include "depcov/parallel.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

using namespace depcov;
using depcov::testing::naive_dcov;
using depcov::testing::random_points;
using depcov::testing::random_spd;
using depcov::testing::rel_diff;

namespace {

DistanceMatrix two_point(double d) {
  DistanceMatrix m(2);
  m(0, 1) = d;
  m(1, 0) = d;
  return m;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

PairedSample random_sample(std::size_t n, Eigen::Index p, Eigen::Index q, Engine& engine) {
  return PairedSample(random_points(static_cast<Eigen::Index>(n), p, engine),
                      random_points(static_cast<Eigen::Index>(n), q, engine));
}

}  // namespace

TEST_CASE("terms examples") {
  const DcovTerms one = terms(DistanceMatrix(1), DistanceMatrix(1));
  CHECK(one.t1 == 0.0);
  CHECK(one.t2 == 0.0);
  CHECK(one.t3 == 0.0);

  const double dx = 1.7, dy = 0.3;
  const DcovTerms two = terms(two_point(dx), two_point(dy));
  CHECK(two.t1 == doctest::Approx(dx * dy / 2).epsilon(1e-15));
  CHECK(two.t2 == doctest::Approx(dx * dy / 4).epsilon(1e-15));
  CHECK(two.t3 == doctest::Approx(dx * dy / 4).epsilon(1e-15));

  CHECK_THROWS_AS(terms(DistanceMatrix(2), DistanceMatrix(3)), Error);
}

TEST_CASE("t3 matches a triple loop on random symmetric matrices") {
  Engine engine = stream(21, "t3", 0);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    DistanceMatrix a(5), b(5);
    for (std::size_t k = 0; k < 5; ++k) {
      for (std::size_t l = k + 1; l < 5; ++l) {
        a(k, l) = a(l, k) = u(engine);
        b(k, l) = b(l, k) = u(engine);
      }
    }
    long double s3 = 0;
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t l = 0; l < 5; ++l)
        for (std::size_t m = 0; m < 5; ++m) s3 += static_cast<long double>(a(k, l)) * b(k, m);
    CHECK(rel_diff(terms(a, b).t3, static_cast<double>(s3 / 125.0L)) <= 1e-12);
  }
}

TEST_CASE("v_n and r_n examples") {
  SUBCASE("constant xs") {
    PointMatrix xs = PointMatrix::Constant(6, 2, 1.5);
    Engine engine = stream(1, "const", 0);
    const PairedSample s(xs, random_points(6, 3, engine));
    const DcovEstimate e = r_n(s, NormSpec::euclidean(2), NormSpec::euclidean(3));
    CHECK(e.v_xy == 0.0);
    CHECK(e.v_xx == 0.0);
    CHECK(e.r == 0.0);
  }
  SUBCASE("n = 2 closed form") {
    PointMatrix xs(2, 1), ys(2, 1);
    xs << 0, 1;
    ys << 0, 2;
    const DcovEstimate e = v_n(PairedSample(xs, ys), NormSpec::euclidean(1), NormSpec::euclidean(1));
    CHECK(e.v_xy == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.r == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("ys = xs gives r = 1") {
    Engine engine = stream(2, "self", 0);
    const PointMatrix xs = random_points(40, 3, engine);
    const Matrix w = random_spd(3, engine);
    const DcovEstimate e = r_n(PairedSample(xs, xs), NormSpec::weighted(w), NormSpec::weighted(w));
    CHECK(e.r == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.v_xy == e.v_xx);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(PairedSample(PointMatrix(3, 1), PointMatrix(4, 1)), Error);
    CHECK_THROWS_AS(PairedSample(PointMatrix(0, 1), PointMatrix(0, 1)), Error);
    Engine engine = stream(3, "dims", 0);
    const PairedSample s = random_sample(4, 2, 2, engine);
    CHECK_THROWS_AS(v_n(s, NormSpec::euclidean(3), NormSpec::euclidean(2)), Error);
  }
}

TEST_CASE("v_n matches the naive double and triple sums") {
  Engine engine = stream(4, "naive", 0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    const Eigen::Index p = 1 + trial % 4, q = 1 + (trial / 4) % 3;
    const PairedSample s = random_sample(n, p, q, engine);
    const bool weighted = trial % 2 == 1;
    const Matrix a = random_spd(p, engine), b = random_spd(q, engine);
    const NormSpec sx = weighted ? NormSpec::weighted(a) : NormSpec::euclidean(static_cast<std::size_t>(p));
    const NormSpec sy = weighted ? NormSpec::weighted(b) : NormSpec::euclidean(static_cast<std::size_t>(q));
    const DcovEstimate e = v_n(s, sx, sy);
    const auto ref = naive_dcov(s.xs, s.ys, weighted ? &a : nullptr, weighted ? &b : nullptr);
    const double scale = std::max(ref.t2, 1e-300);
    CHECK(std::fabs(e.terms_xy.t1 - ref.t1) <= 1e-12 * scale);
    CHECK(std::fabs(e.terms_xy.t3 - ref.t3) <= 1e-12 * scale);
    CHECK(std::fabs(e.raw_v_xy - ref.v()) <= 1e-12 * scale);
  }
}

TEST_CASE("invariants over random samples") {
  Engine engine = stream(5, "invariants", 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 40);
    const Eigen::Index p = 1 + trial % 5, q = 1 + trial % 3;
    const PairedSample s = random_sample(n, p, q, engine);
    const NormSpec sx = NormSpec::weighted(random_spd(p, engine));
    const NormSpec sy = NormSpec::euclidean(static_cast<std::size_t>(q));
    const DcovEstimate e = r_n(s, sx, sy);
    CHECK(e.v_xy >= 0.0);
    CHECK(e.v_xx >= 0.0);
    CHECK(e.v_yy >= 0.0);
    CHECK(e.raw_v_xy >= -kClampTolerance * term_scale(e.terms_xy));
    CHECK(e.v_xy * e.v_xy <= e.v_xx * e.v_yy * (1 + 1e-10));
    CHECK(e.r >= 0.0);
    CHECK(e.r <= 1.0);
  }
}

TEST_CASE("relabelling observations is bitwise invariant") {
  Engine engine = stream(6, "relabel", 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial * 3);
    const PairedSample s = random_sample(n, 3, 2, engine);
    const auto perm = random_permutation(n, engine);
    PointMatrix px(s.xs.rows(), s.xs.cols()), py(s.ys.rows(), s.ys.cols());
    for (std::size_t i = 0; i < n; ++i) {
      px.row(static_cast<Eigen::Index>(i)) = s.xs.row(static_cast<Eigen::Index>(perm[i]));
      py.row(static_cast<Eigen::Index>(i)) = s.ys.row(static_cast<Eigen::Index>(perm[i]));
    }
    const DcovEstimate a = r_n(s, NormSpec::euclidean(3), NormSpec::euclidean(2));
    const DcovEstimate b = r_n(PairedSample(px, py), NormSpec::euclidean(3), NormSpec::euclidean(2));
    CHECK(same_bits(a.v_xy, b.v_xy));
    CHECK(same_bits(a.r, b.r));
  }
}

TEST_CASE("swapping X and Y is exact") {
  Engine engine = stream(7, "swap", 0);
  for (int trial = 0; trial < 20; ++trial) {
    const PairedSample s = random_sample(30, 2, 4, engine);
    const NormSpec sx = NormSpec::weighted(random_spd(2, engine));
    const NormSpec sy = NormSpec::weighted(random_spd(4, engine));
    const DcovEstimate a = r_n(s, sx, sy);
    const DcovEstimate b = r_n(PairedSample(s.ys, s.xs), sy, sx);
    CHECK(same_bits(a.v_xy, b.v_xy));
    CHECK(same_bits(a.r, b.r));
    CHECK(same_bits(a.v_xx, b.v_yy));
  }
}

TEST_CASE("weighted statistics equal euclidean statistics on transformed data") {
  Engine engine = stream(8, "sqrt-transform", 0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index p = 1 + trial % 6, q = 1 + trial % 4;
    const PairedSample s = random_sample(25, p, q, engine);
    const Matrix a = random_spd(p, engine), b = random_spd(q, engine);
    const DcovEstimate w = r_n(s, NormSpec::weighted(a), NormSpec::weighted(b));
    const PairedSample t(transform_points(s.xs, spd_sqrt(a)), transform_points(s.ys, spd_sqrt(b)));
    const DcovEstimate e = r_n(t, NormSpec::euclidean(static_cast<std::size_t>(p)),
                               NormSpec::euclidean(static_cast<std::size_t>(q)));
    CHECK(rel_diff(w.v_xy, e.v_xy) <= 1e-10);
    CHECK(rel_diff(w.r, e.r) <= 1e-10);
  }
}

TEST_CASE("statistics scale with the norms") {
  Engine engine = stream(9, "scale", 0);
  const PairedSample s = random_sample(30, 2, 2, engine);
  const NormSpec e2 = NormSpec::euclidean(2);
  const DcovEstimate base = r_n(s, e2, e2);
  const DcovEstimate scaled = r_n(PairedSample(s.xs * 4.0, s.ys), e2, e2);
  CHECK(same_bits(scaled.v_xy, 4.0 * base.v_xy));
  CHECK(same_bits(scaled.r, base.r));
}

TEST_CASE("result is independent of the thread count") {
  Engine engine = stream(10, "threads", 0);
  const PairedSample s = random_sample(300, 3, 3, engine);
  set_thread_limit(1);
  const DcovEstimate a = r_n(s, NormSpec::euclidean(3), NormSpec::euclidean(3));
  set_thread_limit(7);
  const DcovEstimate b = r_n(s, NormSpec::euclidean(3), NormSpec::euclidean(3));
  reset_thread_limit();
  CHECK(same_bits(a.v_xy, b.v_xy));
  CHECK(same_bits(a.r, b.r));
}

TEST_CASE("correlation zero-denominator rule") {
  CHECK(correlation(0.0, 0.0, 1.0, 1.0) == 0.0);
  CHECK(correlation(1e-30, 1e-13, 1e-13, 1.0) == 0.0);
  CHECK(correlation(0.5, 0.25, 1.0, 1.0) == 1.0);
}

#include "depcov/dcov.hpp"

#include "depcov/error.hpp"
#include "depcov/exact_sum.hpp"
#include "depcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace depcov {

PairedSample::PairedSample(PointMatrix x, PointMatrix y) : xs(std::move(x)), ys(std::move(y)) {
  if (xs.rows() == 0 || ys.rows() == 0) fail(Errc::empty_input, "paired sample needs at least one observation");
  if (xs.rows() != ys.rows()) {
    fail(Errc::dimension_mismatch, "xs has " + std::to_string(xs.rows()) + " rows but ys has " +
                                       std::to_string(ys.rows()));
  }
}

namespace {

std::vector<double> row_sums(const DistanceMatrix& d) {
  std::vector<double> sums(d.size());
  parallel_for(d.size(), [&](std::size_t k) { sums[k] = exact_sum(d.row(k)); });
  return sums;
}

}  // namespace

DcovTerms terms(const DistanceMatrix& dx, const DistanceMatrix& dy) {
  if (dx.size() != dy.size()) {
    fail(Errc::size_mismatch, "distance matrices have sizes " + std::to_string(dx.size()) + " and " +
                                  std::to_string(dy.size()));
  }
  const std::size_t n = dx.size();
  if (n == 0) return {};
  const double nn = static_cast<double>(n);

  std::vector<double> cross(n);
  parallel_for(n, [&](std::size_t k) {
    ExactSum acc;
    const auto rx = dx.row(k);
    const auto ry = dy.row(k);
    for (std::size_t l = 0; l < n; ++l) acc.add(rx[l] * ry[l]);
    cross[k] = acc.result();
  });
  const std::vector<double> rx = row_sums(dx);
  const std::vector<double> ry = &dx == &dy ? rx : row_sums(dy);

  ExactSum t3;
  for (std::size_t k = 0; k < n; ++k) t3.add(rx[k] * ry[k]);

  DcovTerms t;
  t.t1 = exact_sum(cross) / (nn * nn);
  t.t2 = (exact_sum(rx) / (nn * nn)) * (exact_sum(ry) / (nn * nn));
  t.t3 = t3.result() / (nn * nn * nn);
  return t;
}

double term_scale(const DcovTerms& t) { return t.t2 + std::numeric_limits<double>::epsilon(); }

double combine_raw(const DcovTerms& t) { return t.t1 + t.t2 - 2.0 * t.t3; }

double combine(const DcovTerms& t) {
  const double v = combine_raw(t);
  if (v < 0.0 && v >= -kClampTolerance * term_scale(t)) return 0.0;
  return v;
}

double correlation(double v_xy, double v_xx, double v_yy, double scale) {
  const double denom = v_xx * v_yy;
  if (!(denom > kDenominatorFloor * scale * scale)) return 0.0;
  return std::clamp(v_xy / std::sqrt(denom), 0.0, 1.0);
}

DcovEstimate estimate_from_distances(const DistanceMatrix& dx, const DistanceMatrix& dy) {
  DcovEstimate e;
  e.n = dx.size();
  e.terms_xy = terms(dx, dy);
  e.terms_xx = terms(dx, dx);
  e.terms_yy = terms(dy, dy);
  e.raw_v_xy = combine_raw(e.terms_xy);
  e.raw_v_xx = combine_raw(e.terms_xx);
  e.raw_v_yy = combine_raw(e.terms_yy);
  e.v_xy = combine(e.terms_xy);
  e.v_xx = combine(e.terms_xx);
  e.v_yy = combine(e.terms_yy);
  e.r = correlation(e.v_xy, e.v_xx, e.v_yy, term_scale(e.terms_xy));
  return e;
}

DcovEstimate v_n(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y) {
  if (sample.size() == 0) fail(Errc::empty_input, "empty sample");
  const DistanceMatrix dx = pairwise_distance_matrix(sample.xs, spec_x);
  const DistanceMatrix dy = pairwise_distance_matrix(sample.ys, spec_y);
  return estimate_from_distances(dx, dy);
}

DcovEstimate r_n(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y) {
  return v_n(sample, spec_x, spec_y);
}

}  // namespace depcov

#pragma once

#include "depcov/norms.hpp"

#include <cstddef>

namespace depcov {

/// n aligned observations; row i of xs is paired with row i of ys.
struct PairedSample {
  PointMatrix xs;
  PointMatrix ys;

  PairedSample() = default;
  PairedSample(PointMatrix x, PointMatrix y);

  std::size_t size() const noexcept { return static_cast<std::size_t>(xs.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(xs.cols()); }
  std::size_t q() const noexcept { return static_cast<std::size_t>(ys.cols()); }
};

struct DcovTerms {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

struct DcovEstimate {
  double v_xy = 0.0;
  double v_xx = 0.0;
  double v_yy = 0.0;
  double r = 0.0;
  // t1 + t2 - 2 t3 before clamping tiny negative rounding residue to zero
  double raw_v_xy = 0.0;
  double raw_v_xx = 0.0;
  double raw_v_yy = 0.0;
  DcovTerms terms_xy;
  DcovTerms terms_xx;
  DcovTerms terms_yy;
  std::size_t n = 0;
};

inline constexpr double kClampTolerance = 1e-10;
inline constexpr double kDenominatorFloor = 1e-24;

/// t1 = n^-2 sum dx*dy, t2 = (n^-2 sum dx)(n^-2 sum dy),
/// t3 = n^-3 sum_k rowsum_k(dx) rowsum_k(dy).
/// Every sum is correctly rounded, so relabelling observations leaves the
/// result bit-identical.
DcovTerms terms(const DistanceMatrix& dx, const DistanceMatrix& dy);

/// t2 + machine epsilon; the reference magnitude for clamping and floors.
double term_scale(const DcovTerms& t);

/// t1 + t2 - 2 t3, with values in [-1e-10 * scale, 0) clamped to 0.
double combine(const DcovTerms& t);
double combine_raw(const DcovTerms& t);

/// v_xy / sqrt(v_xx v_yy), or 0 when the product is at or below
/// 1e-24 * scale^2; clamped into [0, 1].
double correlation(double v_xy, double v_xx, double v_yy, double scale);

DcovEstimate estimate_from_distances(const DistanceMatrix& dx, const DistanceMatrix& dy);

DcovEstimate v_n(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y);

/// Same computation as v_n; kept separate to mirror the two statistics.
DcovEstimate r_n(const PairedSample& sample, const NormSpec& spec_x, const NormSpec& spec_y);

}  // namespace depcov

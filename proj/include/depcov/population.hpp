#pragma once

#include "depcov/norms.hpp"

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace depcov {

inline constexpr std::size_t kMaxOracleSupport = 200;

/// Finite-support joint law of (X, Y): atom i is (xs.row(i), ys.row(i)) with
/// probability probs[i].
class DiscreteJoint {
 public:
  // Throws InvalidDistribution (negative or non-normalized probabilities,
  // empty support) or DimensionMismatch.
  DiscreteJoint(PointMatrix xs, PointMatrix ys, std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(xs_.cols()); }
  std::size_t q() const noexcept { return static_cast<std::size_t>(ys_.cols()); }
  const PointMatrix& xs() const noexcept { return xs_; }
  const PointMatrix& ys() const noexcept { return ys_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  /// Product of the two marginals over the same atom values.
  DiscreteJoint independent_coupling() const;

  /// True when P(X = a, Y = b) = P(X = a) P(Y = b) for all support values.
  bool factorizes(double tol = 1e-12) const;

 private:
  PointMatrix xs_;
  PointMatrix ys_;
  std::vector<double> probs_;
};

struct PopulationDcov {
  double t10 = 0.0;
  double t20 = 0.0;
  double t30 = 0.0;
  double v0 = 0.0;
  double v0_x = 0.0;
  double v0_y = 0.0;
  double r0 = 0.0;
};

/// Exact T10, T20, T30 (direct triple sum over the support) and V0, R0.
/// Support is capped at kMaxOracleSupport atoms.
PopulationDcov v0_exact(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y);

/// Finite-support law of a random vector.
struct DiscreteMarginal {
  PointMatrix values;
  std::vector<double> probs;

  static DiscreteMarginal point_mass(std::size_t dim);
};

/// X = (X1 + X2, X3), Y = (Y1 + Y2, Y3) with (X1, Y1) jointly distributed and
/// X2, X3, Y2, Y3 mutually independent and independent of (X1, Y1).
struct FiniteDependenceSpec {
  DiscreteJoint core;  // (X1, Y1): X1 in R^p1, Y1 in R^q1
  DiscreteMarginal x_shift;  // X2 in R^p1
  DiscreteMarginal x_extra;  // X3 in R^p2
  DiscreteMarginal y_shift;  // Y2 in R^q1
  DiscreteMarginal y_extra;  // Y3 in R^q2
};

/// Explicit product-measure enumeration of the joint of (X, Y). Atoms are
/// not merged. Throws SupportTooLarge when the product support exceeds
/// max_support.
DiscreteJoint finite_dependence_joint(const FiniteDependenceSpec& spec, std::size_t max_support = kMaxOracleSupport);

struct CfIntegralConfig {
  double truncation = 200.0;
  double step = 0.05;
  double c1 = std::numbers::pi;
};

/// (1/c1^2) * integral over [-T,T]^2 of |f_XY(t,s) - f_X(t) f_Y(s)|^2 / (t^2 s^2)
/// by the midpoint rule. Requires p = q = 1.
double cf_integral_v0_1d(const DiscreteJoint& joint, const CfIntegralConfig& cfg = {});

struct CfConvergenceReport {
  double fine = 0.0;    // at cfg.step
  double coarse = 0.0;  // at 2 * cfg.step
  double richardson = 0.0;  // fine + (fine - coarse) / 3
};

CfConvergenceReport cf_integral_convergence(const DiscreteJoint& joint, const CfIntegralConfig& cfg = {});

/// Centered Brownian-kernel representation: sum_ij p_i p_j Kx~(i,j) Ky~(i,j)
/// with K(i,j) = |a_i| + |a_j| - |a_i - a_j| double-centered under the atom
/// probabilities.
double brownian_kernel_v0(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y);

/// Same expectation without centering. Kept to document that it does not
/// reproduce V0.
double brownian_kernel_uncentered(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y);

}  // namespace depcov

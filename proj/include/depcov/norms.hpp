#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace depcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// One observation per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SpdTolerance {
  double tol_sym = 1e-9;
  double eig_floor = 1e-12;
};

/// Returns (M + M^T)/2 if M is symmetric within tol_sym (max absolute
/// entry-wise asymmetry) and its smallest eigenvalue exceeds eig_floor.
/// Throws NotSymmetric or NotPositiveDefinite otherwise.
Matrix validate_spd(const Matrix& m, SpdTolerance tol = {});

/// Symmetric positive definite square root via eigendecomposition.
Matrix spd_sqrt(const Matrix& m, SpdTolerance tol = {});

/// Euclidean norm or the quadratic-form norm sqrt(x' A x) for an SPD weight A.
class NormSpec {
 public:
  enum class Kind { euclidean, weighted };

  static NormSpec euclidean(std::size_t dim);
  static NormSpec weighted(const Matrix& weight, SpdTolerance tol = {});

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_weighted() const noexcept { return kind_ == Kind::weighted; }
  bool is_diagonal() const noexcept { return diagonal_; }
  // Empty for euclidean specs.
  const Matrix& weight() const noexcept { return weight_; }

  double operator()(std::span<const double> x) const;

  // "euclidean" or "weighted"
  std::string kind_name() const;

 private:
  NormSpec(Kind kind, std::size_t dim, Matrix weight, bool diagonal)
      : kind_(kind), dim_(dim), weight_(std::move(weight)), diagonal_(diagonal) {}

  Kind kind_;
  std::size_t dim_;
  Matrix weight_;
  bool diagonal_;
};

double norm(std::span<const double> x, const NormSpec& spec);

/// Dense symmetric matrix of pairwise distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t k, std::size_t l) const { return entries_[k * n_ + l]; }
  double& operator()(std::size_t k, std::size_t l) { return entries_[k * n_ + l]; }
  std::span<const double> row(std::size_t k) const { return {entries_.data() + k * n_, n_}; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Entry (k,l) = spec(points[k] - points[l]); each unordered pair is
/// evaluated once and mirrored.
DistanceMatrix pairwise_distance_matrix(const PointMatrix& points, const NormSpec& spec);

/// Rows mapped through x -> transform * x.
PointMatrix transform_points(const PointMatrix& points, const Matrix& transform);

}  // namespace depcov

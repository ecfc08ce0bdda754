#include "depcov/norms.hpp"

#include "depcov/error.hpp"
#include "depcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace depcov {

Matrix validate_spd(const Matrix& m, SpdTolerance tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(Errc::dimension_mismatch, "matrix must be square and non-empty, got " + std::to_string(m.rows()) +
                                       "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) fail(Errc::not_positive_definite, "matrix has non-finite entries");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.tol_sym) {
    std::ostringstream msg;
    msg << "asymmetry " << asym << " exceeds tolerance " << tol.tol_sym;
    fail(Errc::not_symmetric, msg.str());
  }
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > tol.eig_floor)) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << smallest << " is not above floor " << tol.eig_floor;
    fail(Errc::not_positive_definite, msg.str());
  }
  return sym;
}

Matrix spd_sqrt(const Matrix& m, SpdTolerance tol) {
  const Matrix sym = validate_spd(m, tol);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector roots = eig.eigenvalues().cwiseSqrt();
  Matrix s = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

NormSpec NormSpec::euclidean(std::size_t dim) {
  if (dim == 0) fail(Errc::dimension_mismatch, "norm dimension must be positive");
  return NormSpec(Kind::euclidean, dim, Matrix(), false);
}

NormSpec NormSpec::weighted(const Matrix& weight, SpdTolerance tol) {
  Matrix w = validate_spd(weight, tol);
  const bool diagonal = (w - Matrix(w.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  const auto dim = static_cast<std::size_t>(w.rows());
  return NormSpec(Kind::weighted, dim, std::move(w), diagonal);
}

double NormSpec::operator()(std::span<const double> x) const {
  if (x.size() != dim_) {
    fail(Errc::dimension_mismatch,
         "vector has length " + std::to_string(x.size()) + ", norm expects " + std::to_string(dim_));
  }
  double q = 0.0;
  if (kind_ == Kind::euclidean) {
    for (double v : x) q += v * v;
    return std::sqrt(q);
  }
  if (diagonal_) {
    for (std::size_t i = 0; i < dim_; ++i) q += x[i] * (weight_(i, i) * x[i]);
  } else {
    for (std::size_t i = 0; i < dim_; ++i) {
      double ax = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) ax += weight_(i, j) * x[j];
      q += x[i] * ax;
    }
  }
  // rounding can push a PD form a hair below zero near x = 0
  return std::sqrt(std::max(q, 0.0));
}

std::string NormSpec::kind_name() const { return kind_ == Kind::euclidean ? "euclidean" : "weighted"; }

double norm(std::span<const double> x, const NormSpec& spec) { return spec(x); }

DistanceMatrix pairwise_distance_matrix(const PointMatrix& points, const NormSpec& spec) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n == 0) fail(Errc::empty_input, "no points");
  const auto dim = static_cast<std::size_t>(points.cols());
  if (dim != spec.dim()) {
    fail(Errc::dimension_mismatch,
         "points have dimension " + std::to_string(dim) + ", norm expects " + std::to_string(spec.dim()));
  }

  DistanceMatrix d(n);
  parallel_for(n, [&](std::size_t k) {
    std::vector<double> diff(dim);
    for (std::size_t l = k + 1; l < n; ++l) {
      for (std::size_t j = 0; j < dim; ++j) diff[j] = points(k, j) - points(l, j);
      const double dist = spec(diff);
      d(k, l) = dist;
      d(l, k) = dist;
    }
  });
  return d;
}

PointMatrix transform_points(const PointMatrix& points, const Matrix& transform) {
  if (transform.cols() != points.cols()) fail(Errc::dimension_mismatch, "transform does not match point dimension");
  return points * transform.transpose();
}

}  // namespace depcov

#include "depcov/hilbert.hpp"

#include "depcov/error.hpp"
#include "depcov/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace depcov {

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  const std::size_t g = grid.size();
  std::vector<double> w(g, 0.0);
  for (std::size_t i = 0; i + 1 < g; ++i) {
    const double half = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

std::vector<double> uniform_grid(std::size_t size) {
  if (size < 2) fail(Errc::bad_config, "grid needs at least two points");
  std::vector<double> grid(size);
  for (std::size_t i = 0; i < size; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(size - 1);
  return grid;
}

namespace {

Vector weights_vector(const std::vector<double>& grid) {
  const auto w = trapezoid_weights(grid);
  return Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

Matrix trapezoid_gram(const Matrix& values, const std::vector<double>& grid) {
  const Vector w = weights_vector(grid);
  Matrix g = values * w.asDiagonal() * values.transpose();
  return 0.5 * (g + g.transpose());
}

void renormalize_rows(Matrix& values, const std::vector<double>& grid) {
  const Vector w = weights_vector(grid);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const double sq = values.row(i).cwiseProduct(values.row(i)).dot(w.transpose());
    if (!(sq > 0.0)) fail(Errc::empty_basis, "basis function " + std::to_string(i + 1) + " vanishes on the grid");
    values.row(i) /= std::sqrt(sq);
  }
}

BasisModel make_model(std::string id, std::vector<double> lambdas, std::size_t grid_size, bool orthonormal) {
  if (lambdas.empty()) fail(Errc::empty_basis, "basis needs at least one term");
  BasisModel model;
  model.id = std::move(id);
  model.grid = uniform_grid(grid_size);
  model.values = Matrix::Zero(static_cast<Eigen::Index>(lambdas.size()), static_cast<Eigen::Index>(grid_size));
  model.lambdas = std::move(lambdas);
  model.orthonormal = orthonormal;
  return model;
}

// Orthonormal shifted Legendre polynomials on [0, 1], rows 0..count-1.
Matrix shifted_legendre(std::size_t count, const std::vector<double>& grid) {
  Matrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = 2.0 * grid[j] - 1.0;
    double prev = 1.0;
    double cur = x;
    for (std::size_t k = 0; k < count; ++k) {
      double pk;
      if (k == 0) {
        pk = 1.0;
      } else if (k == 1) {
        pk = x;
      } else {
        const double kk = static_cast<double>(k);
        const double next = ((2.0 * kk - 1.0) * x * cur - (kk - 1.0) * prev) / kk;
        prev = cur;
        cur = next;
        pk = next;
      }
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::sqrt(2.0 * static_cast<double>(k) + 1.0) * pk;
    }
  }
  return out;
}

}  // namespace

void validate_basis(const BasisModel& model, double quad_tol) {
  if (model.terms() == 0) fail(Errc::empty_basis, "basis has no functions");
  if (model.grid.size() < 2) fail(Errc::grid_mismatch, "grid needs at least two points");
  for (std::size_t i = 0; i < model.grid.size(); ++i) {
    if (model.grid[i] < 0.0 || model.grid[i] > 1.0 || (i > 0 && !(model.grid[i] > model.grid[i - 1]))) {
      fail(Errc::grid_mismatch, "grid must be strictly increasing inside [0, 1]");
    }
  }
  if (static_cast<std::size_t>(model.values.cols()) != model.grid.size()) {
    fail(Errc::grid_mismatch, "basis tabulation does not match the grid");
  }
  if (model.lambdas.size() != model.terms()) {
    fail(Errc::length_mismatch, "need one lambda per basis function");
  }
  const Matrix g = trapezoid_gram(model.values, model.grid);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (std::fabs(g(i, i) - 1.0) > quad_tol) {
      std::ostringstream msg;
      msg << "basis function " << i + 1 << " has squared norm " << g(i, i);
      fail(Errc::bad_config, msg.str());
    }
  }
  if (model.orthonormal) {
    const double dev = (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    if (dev > quad_tol) {
      std::ostringstream msg;
      msg << "basis claims orthonormality but the Gram matrix deviates from identity by " << dev;
      fail(Errc::bad_config, msg.str());
    }
  }
}

BasisModel fourier_basis(std::vector<double> lambdas, std::size_t grid_size) {
  BasisModel model = make_model("fourier", std::move(lambdas), grid_size, true);
  const double root2 = std::numbers::sqrt2;
  for (Eigen::Index i = 0; i < model.values.rows(); ++i) {
    const double freq = 2.0 * std::numbers::pi * static_cast<double>((i + 1) / 2);
    for (std::size_t j = 0; j < model.grid.size(); ++j) {
      const double t = model.grid[j];
      double v = 1.0;
      if (i > 0) v = (i % 2 == 1) ? root2 * std::cos(freq * t) : root2 * std::sin(freq * t);
      model.values(i, static_cast<Eigen::Index>(j)) = v;
    }
  }
  return model;
}

BasisModel monomial_basis(std::vector<double> lambdas, std::size_t grid_size) {
  BasisModel model = make_model("monomial", std::move(lambdas), grid_size, false);
  for (Eigen::Index i = 0; i < model.values.rows(); ++i) {
    for (std::size_t j = 0; j < model.grid.size(); ++j) {
      model.values(i, static_cast<Eigen::Index>(j)) = std::pow(model.grid[j], static_cast<double>(i));
    }
  }
  renormalize_rows(model.values, model.grid);
  return model;
}

BasisModel legendre_mix_basis(std::vector<double> lambdas, std::size_t grid_size) {
  BasisModel model = make_model("legendre_mix", std::move(lambdas), grid_size, false);
  const Matrix legendre = shifted_legendre(model.terms(), model.grid);
  model.values.row(0) = legendre.row(0);
  for (Eigen::Index i = 1; i < model.values.rows(); ++i) model.values.row(i) = legendre.row(i - 1) + legendre.row(i);
  renormalize_rows(model.values, model.grid);
  return model;
}

std::vector<double> geometric_lambdas(double ratio, std::size_t count) {
  std::vector<double> out(count);
  double v = 1.0;
  for (auto& l : out) {
    v *= ratio;
    l = v;
  }
  return out;
}

std::string to_string(ZDistribution z) {
  return z == ZDistribution::rademacher ? "rademacher" : "standard_gaussian";
}

ZDistribution parse_z_distribution(const std::string& name) {
  if (name == "rademacher") return ZDistribution::rademacher;
  if (name == "standard_gaussian" || name == "gaussian") return ZDistribution::standard_gaussian;
  fail(Errc::bad_config, "unknown Z distribution '" + name + "'");
}

double draw_z(ZDistribution z, Engine& engine) {
  return z == ZDistribution::rademacher ? rademacher(engine) : standard_normal(engine);
}

KlSample simulate_kl(const BasisModel& model, std::size_t n, ZDistribution z, std::uint64_t seed) {
  if (model.terms() == 0) fail(Errc::empty_basis, "basis has no functions");
  if (n == 0) fail(Errc::empty_input, "need at least one sample");
  if (model.lambdas.size() != model.terms()) fail(Errc::length_mismatch, "need one lambda per basis function");

  const auto m = static_cast<Eigen::Index>(model.terms());
  KlSample out;
  out.z = PointMatrix(static_cast<Eigen::Index>(n), m);
  parallel_for(n, [&](std::size_t j) {
    Engine engine = stream(seed, "kl", j);
    for (Eigen::Index i = 0; i < m; ++i) out.z(static_cast<Eigen::Index>(j), i) = draw_z(z, engine);
  });
  const Vector lambdas = Eigen::Map<const Vector>(model.lambdas.data(), m);
  out.values = (out.z * lambdas.asDiagonal()) * model.values;
  return out;
}

KlPair simulate_kl_pair(const BasisModel& model, std::size_t n, ZDistribution z, std::size_t shared_dim,
                        double noise_sd, std::uint64_t seed) {
  if (shared_dim > model.terms()) fail(Errc::bad_config, "shared dimension exceeds the number of basis functions");
  if (!(noise_sd >= 0.0)) fail(Errc::bad_config, "noise standard deviation must be nonnegative");
  KlPair out;
  out.x = simulate_kl(model, n, z, seed);

  const auto m = static_cast<Eigen::Index>(model.terms());
  out.y.z = PointMatrix(static_cast<Eigen::Index>(n), m);
  parallel_for(n, [&](std::size_t j) {
    Engine engine = stream(seed, "kl-y", j);
    const auto row = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (static_cast<std::size_t>(i) < shared_dim) {
        const double zx = out.x.z(row, i);
        out.y.z(row, i) = noise_sd > 0.0 ? zx + noise_sd * standard_normal(engine) : zx;
      } else {
        out.y.z(row, i) = draw_z(z, engine);
      }
    }
  });
  const Vector lambdas = Eigen::Map<const Vector>(model.lambdas.data(), m);
  out.y.values = (out.y.z * lambdas.asDiagonal()) * model.values;
  return out;
}

GramMatrix gram(const BasisModel& model, std::size_t m, SpdTolerance tol) {
  if (m == 0 || m > model.terms()) {
    fail(Errc::bad_config, "truncation " + std::to_string(m) + " outside 1.." + std::to_string(model.terms()));
  }
  const Matrix g = trapezoid_gram(model.values.topRows(static_cast<Eigen::Index>(m)), model.grid);
  return {validate_spd(g, tol), "trapezoid"};
}

double gram_tail_sum(const BasisModel& model, std::size_t m) {
  const Matrix g = trapezoid_gram(model.values, model.grid);
  double total = 0.0;
  for (std::size_t i = m; i < model.terms(); ++i) {
    for (std::size_t j = m; j < model.terms(); ++j) {
      total += model.lambdas[i] * model.lambdas[j] * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return total;
}

EmbeddingResult embed(const PointMatrix& samples, const BasisModel& model, std::size_t m) {
  if (static_cast<std::size_t>(samples.cols()) != model.grid_size()) {
    fail(Errc::grid_mismatch, "samples have " + std::to_string(samples.cols()) + " grid values, model grid has " +
                                  std::to_string(model.grid_size()));
  }
  GramMatrix g = gram(model, m);
  const auto mm = static_cast<Eigen::Index>(m);
  const Vector w = weights_vector(model.grid);
  const Matrix basis = model.values.topRows(mm);
  // inner products <x_j, phi_i>, one row per sample
  const Matrix inner = samples * w.asDiagonal() * basis.transpose();

  EmbeddingResult out;
  out.m = m;
  Eigen::LLT<Matrix> chol(g.a);
  if (chol.info() != Eigen::Success) fail(Errc::not_positive_definite, "Gram matrix factorization failed");
  out.coeffs = chol.solve(inner.transpose()).transpose();
  out.norm = model.orthonormal ? NormSpec::euclidean(m) : NormSpec::weighted(g.a);
  out.gram = std::move(g.a);
  if (model.lambdas.size() == model.terms()) {
    double tail = 0.0;
    for (std::size_t i = m; i < model.terms(); ++i) tail += model.lambdas[i] * model.lambdas[i];
    out.predicted_tail_error = tail;
  }
  return out;
}

PointMatrix reconstruct(const PointMatrix& coeffs, const BasisModel& model) {
  if (static_cast<std::size_t>(coeffs.cols()) > model.terms()) fail(Errc::dimension_mismatch, "too many coefficients");
  return coeffs * model.values.topRows(coeffs.cols());
}

std::vector<double> l2_norm_squared(const PointMatrix& tabulated, const std::vector<double>& grid) {
  if (static_cast<std::size_t>(tabulated.cols()) != grid.size()) fail(Errc::grid_mismatch, "tabulation does not match grid");
  const Vector w = weights_vector(grid);
  std::vector<double> out(static_cast<std::size_t>(tabulated.rows()));
  for (Eigen::Index i = 0; i < tabulated.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = tabulated.row(i).cwiseProduct(tabulated.row(i)).dot(w.transpose());
  }
  return out;
}

NormSpec quadrature_norm(const std::vector<double>& grid) {
  const Vector w = weights_vector(grid);
  return NormSpec::weighted(Matrix(w.asDiagonal()));
}

TruncationResult ell2_truncate(const PointMatrix& vectors, std::size_t m) {
  if (m > static_cast<std::size_t>(vectors.cols())) {
    fail(Errc::length_mismatch, "truncation " + std::to_string(m) + " exceeds vector length " +
                                    std::to_string(vectors.cols()));
  }
  const auto mm = static_cast<Eigen::Index>(m);
  TruncationResult out;
  out.vectors = vectors.leftCols(mm);
  if (vectors.rows() > 0) {
    const auto tail = vectors.rightCols(vectors.cols() - mm);
    out.discarded_energy = tail.squaredNorm() / static_cast<double>(vectors.rows());
  }
  return out;
}

PairedSample finite_dependence_sample(const FiniteDependenceConfig& cfg, std::size_t n, std::uint64_t seed) {
  const std::size_t dim = cfg.lambdas.size();
  if (dim == 0) fail(Errc::bad_config, "need at least one coordinate");
  if (cfg.shared_dim > dim) fail(Errc::bad_config, "shared dimension exceeds coordinate count");
  if (!(cfg.noise_sd >= 0.0)) fail(Errc::bad_config, "noise standard deviation must be nonnegative");
  if (n == 0) fail(Errc::bad_config, "need at least one pair");

  const auto d = static_cast<Eigen::Index>(dim);
  PointMatrix xs(static_cast<Eigen::Index>(n), d);
  PointMatrix ys(static_cast<Eigen::Index>(n), d);
  parallel_for(n, [&](std::size_t j) {
    Engine engine = stream(seed, "finite-dependence", j);
    const auto row = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double z = draw_z(cfg.z, engine);
      double w;
      if (static_cast<std::size_t>(i) < cfg.shared_dim) {
        w = cfg.noise_sd > 0.0 ? z + cfg.noise_sd * standard_normal(engine) : z;
      } else {
        w = draw_z(cfg.z, engine);
      }
      const double lambda = cfg.lambdas[static_cast<std::size_t>(i)];
      xs(row, i) = lambda * z;
      ys(row, i) = lambda * w;
    }
  });
  return PairedSample(std::move(xs), std::move(ys));
}

}  // namespace depcov

#pragma once

#include "depcov/dcov.hpp"
#include "depcov/norms.hpp"
#include "depcov/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace depcov {

inline constexpr std::size_t kDefaultGridSize = 512;
inline constexpr double kQuadTolerance = 1e-6;

/// Trapezoid weights for a strictly increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& grid);

/// Uniform grid of `size` points covering [0, 1] including both ends.
std::vector<double> uniform_grid(std::size_t size);

/// Basis functions tabulated on a grid together with the expansion
/// coefficients lambda_i of X(t) = sum_i lambda_i Z_i phi_i(t).
struct BasisModel {
  std::string id;
  std::vector<double> grid;
  Matrix values;  // m_full x grid size, row i = phi_i on the grid
  std::vector<double> lambdas;
  bool orthonormal = false;

  std::size_t terms() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t grid_size() const noexcept { return grid.size(); }
};

/// Checks grid monotonicity, unit norms and (for orthonormal models) the
/// identity Gram matrix, all within quad_tol.
void validate_basis(const BasisModel& model, double quad_tol = kQuadTolerance);

/// 1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), sqrt2 cos(4 pi t), ...
BasisModel fourier_basis(std::vector<double> lambdas, std::size_t grid_size = kDefaultGridSize);

/// Monomials t^0, t^1, ... renormalized to unit L2 norm. Not orthogonal; the
/// Gram matrix becomes ill-conditioned quickly, keep m <= 8.
BasisModel monomial_basis(std::vector<double> lambdas, std::size_t grid_size = kDefaultGridSize);

/// phi_1 = L_0, phi_i = (L_{i-2} + L_{i-1}) / sqrt2 for orthonormal shifted
/// Legendre L_k, renormalized on the grid. Non-orthogonal with a
/// well-conditioned tridiagonal Gram matrix.
BasisModel legendre_mix_basis(std::vector<double> lambdas, std::size_t grid_size = kDefaultGridSize);

/// Geometric coefficients lambda_i = ratio^i, i = 1..count.
std::vector<double> geometric_lambdas(double ratio, std::size_t count);

enum class ZDistribution { rademacher, standard_gaussian };

std::string to_string(ZDistribution z);
ZDistribution parse_z_distribution(const std::string& name);

double draw_z(ZDistribution z, Engine& engine);

struct KlSample {
  PointMatrix values;  // n x grid size
  PointMatrix z;       // n x m_full, the Z_i draws
};

/// n draws of sum_i lambda_i Z_i phi_i on the model grid. Sample j uses its
/// own random stream derived from (seed, j).
KlSample simulate_kl(const BasisModel& model, std::size_t n, ZDistribution z, std::uint64_t seed);

struct KlPair {
  KlSample x;
  KlSample y;
};

/// Functional finite-dependence pairs: X from simulate_kl, and Y on the same
/// basis with latent W_i = Z_i + noise_sd * e_i for i <= shared_dim and an
/// independent draw otherwise.
KlPair simulate_kl_pair(const BasisModel& model, std::size_t n, ZDistribution z, std::size_t shared_dim,
                        double noise_sd, std::uint64_t seed);

struct GramMatrix {
  Matrix a;
  std::string rule = "trapezoid";
};

/// Trapezoid inner products of the first m basis functions, validated SPD.
GramMatrix gram(const BasisModel& model, std::size_t m, SpdTolerance tol = {});

/// sum_{i,j > m} lambda_i lambda_j a_ij over the finite tail of the model.
double gram_tail_sum(const BasisModel& model, std::size_t m);

struct EmbeddingResult {
  PointMatrix coeffs;  // n x m
  std::size_t m = 0;
  NormSpec norm = NormSpec::euclidean(1);
  Matrix gram;
  std::optional<double> predicted_tail_error;
};

/// Projects tabulated samples onto span{phi_1..phi_m}: coefficients solve
/// G c = <x, phi>. The induced norm is euclidean for orthonormal models and
/// weighted by G otherwise, so coefficient norms equal L2 norms of the
/// projections.
EmbeddingResult embed(const PointMatrix& samples, const BasisModel& model, std::size_t m);

/// Tabulates sum_i c_i phi_i for each coefficient row.
PointMatrix reconstruct(const PointMatrix& coeffs, const BasisModel& model);

/// Trapezoid L2 norm squared of each row.
std::vector<double> l2_norm_squared(const PointMatrix& tabulated, const std::vector<double>& grid);

/// Diagonal trapezoid-weight norm: the L2[0,1] norm of tabulated functions.
NormSpec quadrature_norm(const std::vector<double>& grid);

struct TruncationResult {
  PointMatrix vectors;
  double discarded_energy = 0.0;  // mean over rows of sum_{i>m} v_i^2
};

TruncationResult ell2_truncate(const PointMatrix& vectors, std::size_t m);

struct FiniteDependenceConfig {
  std::size_t shared_dim = 0;  // k: leading latent coordinates shared by X and Y
  std::vector<double> lambdas;  // coefficient scale per coordinate (both sides)
  double noise_sd = 1.0;        // Y_i = lambda_i (Z_i + noise_sd * e_i), i <= k
  ZDistribution z = ZDistribution::standard_gaussian;
};

/// Pairs of coefficient vectors whose dependence lives only in the first k
/// coordinates; every other coordinate is independent noise. k = 0 gives
/// exact independence.
PairedSample finite_dependence_sample(const FiniteDependenceConfig& cfg, std::size_t n, std::uint64_t seed);

}  // namespace depcov

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "depcov/dcov.hpp"
#include "depcov/error.hpp"
#include "depcov/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace depcov;

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

}  // namespace

TEST_CASE("trapezoid weights integrate polynomials of degree one exactly") {
  const std::vector<double> grid{0.0, 0.1, 0.35, 0.6, 1.0};
  const auto w = trapezoid_weights(grid);
  double total = 0, first = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total += w[i];
    first += w[i] * grid[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(first == doctest::Approx(0.5).epsilon(1e-15));
  const auto g = uniform_grid(5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == 0.5);
}

TEST_CASE("gram matrices") {
  const BasisModel fourier = fourier_basis(geometric_lambdas(0.5, 20));
  const GramMatrix g = gram(fourier, 20);
  CHECK((g.a - Matrix::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(g.rule == "trapezoid");

  const BasisModel legendre = legendre_mix_basis(geometric_lambdas(0.5, 6));
  const GramMatrix l1 = gram(legendre, 1);
  CHECK(l1.a.rows() == 1);
  CHECK(l1.a(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  const GramMatrix l6 = gram(legendre, 6);
  CHECK(l6.a(1, 2) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(std::fabs(l6.a(0, 3)) < 1e-4);

  SUBCASE("grid refinement") {
    const BasisModel coarse = legendre_mix_basis(geometric_lambdas(0.5, 6), 257);
    const BasisModel fine = legendre_mix_basis(geometric_lambdas(0.5, 6), 1025);
    const double err_coarse = (gram(coarse, 6).a - l6.a).cwiseAbs().maxCoeff();
    const double err_fine = (gram(fine, 6).a - l6.a).cwiseAbs().maxCoeff();
    CHECK(err_fine < err_coarse);
  }

  SUBCASE("duplicate basis function") {
    BasisModel dup = fourier;
    dup.values.row(1) = dup.values.row(0);
    dup.orthonormal = false;
    CHECK(error_of([&] { gram(dup, 3); }) == Errc::not_positive_definite);
  }
  CHECK(error_of([&] { gram(fourier, 0); }) == Errc::bad_config);
  CHECK(error_of([&] { gram(fourier, 21); }) == Errc::bad_config);
}

TEST_CASE("simulate_kl examples") {
  const BasisModel zero = fourier_basis(std::vector<double>(5, 0.0), 64);
  const KlSample zs = simulate_kl(zero, 10, ZDistribution::standard_gaussian, 1);
  CHECK(zs.values.cwiseAbs().maxCoeff() == 0.0);

  const BasisModel single = fourier_basis({1.0, 0.0, 0.0}, 64);
  const KlSample s = simulate_kl(single, 20, ZDistribution::rademacher, 2);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double sign = s.z(i, 0);
    CHECK(std::fabs(sign) == 1.0);
    for (Eigen::Index j = 0; j < 64; ++j) CHECK(s.values(i, j) == sign * single.values(0, j));
  }

  const KlSample again = simulate_kl(single, 20, ZDistribution::rademacher, 2);
  CHECK(again.values == s.values);
  CHECK(error_of([&] { simulate_kl(single, 0, ZDistribution::rademacher, 2); }) == Errc::empty_input);
}

TEST_CASE("embedding") {
  const BasisModel fourier = fourier_basis(geometric_lambdas(0.5, 10));

  SUBCASE("phi_1 maps to the first unit vector") {
    PointMatrix sample(1, static_cast<Eigen::Index>(fourier.grid_size()));
    sample.row(0) = fourier.values.row(0);
    const EmbeddingResult e = embed(sample, fourier, 4);
    CHECK(std::fabs(e.coeffs(0, 0) - 1.0) < 1e-6);
    for (Eigen::Index j = 1; j < 4; ++j) CHECK(std::fabs(e.coeffs(0, j)) < 1e-6);
    CHECK_FALSE(e.norm.is_weighted());
  }

  SUBCASE("KL coefficients are recovered") {
    const KlSample s = simulate_kl(fourier, 50, ZDistribution::standard_gaussian, 3);
    const EmbeddingResult e = embed(s.values, fourier, 6);
    for (Eigen::Index i = 0; i < 50; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        CHECK(std::fabs(e.coeffs(i, j) - fourier.lambdas[static_cast<std::size_t>(j)] * s.z(i, j)) < 1e-6);
      }
    }
    REQUIRE(e.predicted_tail_error.has_value());
    double tail = 0;
    for (std::size_t i = 6; i < 10; ++i) tail += fourier.lambdas[i] * fourier.lambdas[i];
    CHECK(*e.predicted_tail_error == doctest::Approx(tail));
  }

  SUBCASE("non-orthogonal basis: coefficient norm equals the L2 norm of the projection") {
    const BasisModel legendre = legendre_mix_basis(geometric_lambdas(0.6, 8));
    const KlSample s = simulate_kl(legendre, 20, ZDistribution::standard_gaussian, 4);
    const EmbeddingResult full = embed(s.values, legendre, 8);
    CHECK(full.norm.is_weighted());
    for (Eigen::Index i = 0; i < 20; ++i) {
      for (Eigen::Index j = 0; j < 8; ++j) {
        CHECK(std::fabs(full.coeffs(i, j) - legendre.lambdas[static_cast<std::size_t>(j)] * s.z(i, j)) < 1e-8);
      }
    }
    const EmbeddingResult part = embed(s.values, legendre, 4);
    const PointMatrix proj = reconstruct(part.coeffs, legendre);
    const auto l2 = l2_norm_squared(proj, legendre.grid);
    for (Eigen::Index i = 0; i < 20; ++i) {
      const std::span<const double> c(part.coeffs.data() + i * 4, 4);
      CHECK(std::pow(part.norm(c), 2) == doctest::Approx(l2[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
  }

  SUBCASE("quadrature norm equals the full embedding norm for orthonormal data") {
    const KlSample s = simulate_kl(fourier, 30, ZDistribution::standard_gaussian, 5);
    const NormSpec q = quadrature_norm(fourier.grid);
    const EmbeddingResult e = embed(s.values, fourier, 10);
    for (Eigen::Index i = 0; i < 30; ++i) {
      const std::span<const double> f(s.values.data() + i * s.values.cols(), static_cast<std::size_t>(s.values.cols()));
      const std::span<const double> c(e.coeffs.data() + i * 10, 10);
      CHECK(q(f) == doctest::Approx(e.norm(c)).epsilon(1e-6));
    }
  }

  CHECK(error_of([&] { embed(PointMatrix::Zero(2, 7), fourier, 3); }) == Errc::grid_mismatch);
}

TEST_CASE("ell2 truncation") {
  PointMatrix v(1, 4);
  v << 1, 0.5, 0.25, 0.125;
  const TruncationResult t = ell2_truncate(v, 2);
  CHECK(t.vectors.cols() == 2);
  CHECK(t.vectors(0, 0) == 1.0);
  CHECK(t.vectors(0, 1) == 0.5);
  CHECK(t.discarded_energy == 5.0 / 64);

  const TruncationResult same = ell2_truncate(v, 4);
  CHECK(same.vectors == v);
  CHECK(same.discarded_energy == 0.0);

  const TruncationResult zeros = ell2_truncate(PointMatrix::Zero(3, 5), 2);
  CHECK(zeros.vectors.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zeros.discarded_energy == 0.0);
  CHECK(error_of([&] { ell2_truncate(v, 5); }) == Errc::length_mismatch);
}

TEST_CASE("finite dependence samples") {
  FiniteDependenceConfig cfg;
  cfg.lambdas = geometric_lambdas(0.5, 8);

  SUBCASE("k = 0 leaves X and Y independent streams") {
    cfg.shared_dim = 0;
    const PairedSample s = finite_dependence_sample(cfg, 200, 9);
    CHECK(s.p() == 8);
    CHECK(s.q() == 8);
    CHECK(r_n(s, NormSpec::euclidean(8), NormSpec::euclidean(8)).r < 0.3);
  }

  SUBCASE("k = 1 raises r_n above the k = 0 baseline") {
    int above = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      cfg.shared_dim = 0;
      const double base = r_n(finite_dependence_sample(cfg, 200, seed), NormSpec::euclidean(8), NormSpec::euclidean(8)).r;
      cfg.shared_dim = 1;
      cfg.noise_sd = 0.0;
      const double dep = r_n(finite_dependence_sample(cfg, 200, seed), NormSpec::euclidean(8), NormSpec::euclidean(8)).r;
      cfg.noise_sd = 1.0;
      above += dep > base;
    }
    CHECK(above >= 18);
  }

  SUBCASE("noiseless full dependence gives r near 1") {
    cfg.shared_dim = 8;
    cfg.noise_sd = 0.0;
    const PairedSample s = finite_dependence_sample(cfg, 100, 11);
    CHECK(r_n(s, NormSpec::euclidean(8), NormSpec::euclidean(8)).r == doctest::Approx(1.0).epsilon(1e-12));
  }

  cfg.shared_dim = 9;
  CHECK(error_of([&] { finite_dependence_sample(cfg, 10, 1); }) == Errc::bad_config);
}

TEST_CASE("z distribution names") {
  CHECK(parse_z_distribution("rademacher") == ZDistribution::rademacher);
  CHECK(parse_z_distribution(to_string(ZDistribution::standard_gaussian)) == ZDistribution::standard_gaussian);
  CHECK(error_of([] { parse_z_distribution("cauchy"); }) == Errc::bad_config);
}

#include "depcov/population.hpp"

#include "depcov/dcov.hpp"
#include "depcov/error.hpp"
#include "depcov/exact_sum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace depcov {
namespace {

void check_probs(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) fail(Errc::invalid_distribution, std::string(what) + " has empty support");
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) fail(Errc::invalid_distribution, std::string(what) + " has a negative probability");
  }
  const double total = exact_sum(probs);
  if (std::fabs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << what << " probabilities sum to " << total << ", not 1";
    fail(Errc::invalid_distribution, msg.str());
  }
}

std::vector<double> row_vec(const PointMatrix& m, Eigen::Index i) {
  return {m.row(i).data(), m.row(i).data() + m.cols()};
}

// Distinct row values -> index, with probabilities accumulated.
std::map<std::vector<double>, double> marginal_masses(const PointMatrix& values, const std::vector<double>& probs) {
  std::map<std::vector<double>, double> masses;
  for (std::size_t i = 0; i < probs.size(); ++i) masses[row_vec(values, static_cast<Eigen::Index>(i))] += probs[i];
  return masses;
}

}  // namespace

DiscreteJoint::DiscreteJoint(PointMatrix xs, PointMatrix ys, std::vector<double> probs)
    : xs_(std::move(xs)), ys_(std::move(ys)), probs_(std::move(probs)) {
  check_probs(probs_, "joint");
  const auto s = static_cast<Eigen::Index>(probs_.size());
  if (xs_.rows() != s || ys_.rows() != s) {
    fail(Errc::dimension_mismatch, "joint atoms and probabilities have different counts");
  }
  if (!xs_.allFinite() || !ys_.allFinite()) fail(Errc::invalid_distribution, "atom coordinates must be finite");
}

DiscreteJoint DiscreteJoint::independent_coupling() const {
  const auto mx = marginal_masses(xs_, probs_);
  const auto my = marginal_masses(ys_, probs_);
  const auto count = static_cast<Eigen::Index>(mx.size() * my.size());
  PointMatrix xs(count, xs_.cols());
  PointMatrix ys(count, ys_.cols());
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(count));
  Eigen::Index row = 0;
  for (const auto& [xv, px] : mx) {
    for (const auto& [yv, py] : my) {
      for (std::size_t j = 0; j < xv.size(); ++j) xs(row, static_cast<Eigen::Index>(j)) = xv[j];
      for (std::size_t j = 0; j < yv.size(); ++j) ys(row, static_cast<Eigen::Index>(j)) = yv[j];
      probs.push_back(px * py);
      ++row;
    }
  }
  // renormalize the rounding residue of the products
  const double total = exact_sum(probs);
  for (double& p : probs) p /= total;
  return DiscreteJoint(std::move(xs), std::move(ys), std::move(probs));
}

bool DiscreteJoint::factorizes(double tol) const {
  const auto mx = marginal_masses(xs_, probs_);
  const auto my = marginal_masses(ys_, probs_);
  std::map<std::pair<std::vector<double>, std::vector<double>>, double> joint;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    joint[{row_vec(xs_, r), row_vec(ys_, r)}] += probs_[i];
  }
  for (const auto& [xv, px] : mx) {
    for (const auto& [yv, py] : my) {
      const auto it = joint.find({xv, yv});
      const double pxy = it == joint.end() ? 0.0 : it->second;
      if (std::fabs(pxy - px * py) > tol) return false;
    }
  }
  return true;
}

namespace {

DcovTerms population_terms(const DistanceMatrix& dx, const DistanceMatrix& dy, const std::vector<double>& p) {
  const std::size_t s = p.size();
  ExactSum t10;
  ExactSum mean_x;
  ExactSum mean_y;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const double w = p[i] * p[j];
      t10.add(w * dx(i, j) * dy(i, j));
      mean_x.add(w * dx(i, j));
      mean_y.add(w * dy(i, j));
    }
  }
  ExactSum t30;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const double wij = p[i] * p[j] * dx(i, j);
      if (wij == 0.0) continue;
      for (std::size_t k = 0; k < s; ++k) t30.add(wij * p[k] * dy(i, k));
    }
  }
  return {t10.result(), mean_x.result() * mean_y.result(), t30.result()};
}

}  // namespace

PopulationDcov v0_exact(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y) {
  if (joint.size() > kMaxOracleSupport) {
    fail(Errc::support_too_large, "support of " + std::to_string(joint.size()) + " atoms exceeds " +
                                      std::to_string(kMaxOracleSupport));
  }
  const DistanceMatrix dx = pairwise_distance_matrix(joint.xs(), spec_x);
  const DistanceMatrix dy = pairwise_distance_matrix(joint.ys(), spec_y);
  const auto& p = joint.probs();

  const DcovTerms xy = population_terms(dx, dy, p);
  const DcovTerms xx = population_terms(dx, dx, p);
  const DcovTerms yy = population_terms(dy, dy, p);

  PopulationDcov out;
  out.t10 = xy.t1;
  out.t20 = xy.t2;
  out.t30 = xy.t3;
  out.v0 = combine(xy);
  out.v0_x = combine(xx);
  out.v0_y = combine(yy);
  out.r0 = correlation(out.v0, out.v0_x, out.v0_y, term_scale(xy));
  return out;
}

DiscreteMarginal DiscreteMarginal::point_mass(std::size_t dim) {
  return {PointMatrix::Zero(1, static_cast<Eigen::Index>(dim)), {1.0}};
}

DiscreteJoint finite_dependence_joint(const FiniteDependenceSpec& spec, std::size_t max_support) {
  const auto p1 = static_cast<Eigen::Index>(spec.core.p());
  const auto q1 = static_cast<Eigen::Index>(spec.core.q());
  const auto p2 = spec.x_extra.values.cols();
  const auto q2 = spec.y_extra.values.cols();
  if (spec.x_shift.values.cols() != p1 || spec.y_shift.values.cols() != q1) {
    fail(Errc::dimension_mismatch, "additive noise blocks must match the core dimensions");
  }
  const DiscreteMarginal* blocks[] = {&spec.x_shift, &spec.x_extra, &spec.y_shift, &spec.y_extra};
  double support = static_cast<double>(spec.core.size());
  for (const auto* b : blocks) {
    check_probs(b->probs, "noise block");
    if (b->values.rows() != static_cast<Eigen::Index>(b->probs.size())) {
      fail(Errc::dimension_mismatch, "noise block values and probabilities have different counts");
    }
    support *= static_cast<double>(b->probs.size());
  }
  if (support > static_cast<double>(max_support)) {
    fail(Errc::support_too_large, "product support " + std::to_string(static_cast<long long>(support)) +
                                      " exceeds " + std::to_string(max_support));
  }

  const auto count = static_cast<Eigen::Index>(support);
  PointMatrix xs(count, p1 + p2);
  PointMatrix ys(count, q1 + q2);
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(count));
  Eigen::Index row = 0;
  const auto& core = spec.core;
  for (std::size_t c = 0; c < core.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    for (std::size_t a = 0; a < spec.x_shift.probs.size(); ++a) {
      for (std::size_t b = 0; b < spec.x_extra.probs.size(); ++b) {
        for (std::size_t u = 0; u < spec.y_shift.probs.size(); ++u) {
          for (std::size_t v = 0; v < spec.y_extra.probs.size(); ++v) {
            const auto ai = static_cast<Eigen::Index>(a), bi = static_cast<Eigen::Index>(b);
            const auto ui = static_cast<Eigen::Index>(u), vi = static_cast<Eigen::Index>(v);
            xs.row(row).head(p1) = core.xs().row(ci) + spec.x_shift.values.row(ai);
            xs.row(row).tail(p2) = spec.x_extra.values.row(bi);
            ys.row(row).head(q1) = core.ys().row(ci) + spec.y_shift.values.row(ui);
            ys.row(row).tail(q2) = spec.y_extra.values.row(vi);
            probs.push_back(core.probs()[c] * spec.x_shift.probs[a] * spec.x_extra.probs[b] *
                            spec.y_shift.probs[u] * spec.y_extra.probs[v]);
            ++row;
          }
        }
      }
    }
  }
  return DiscreteJoint(std::move(xs), std::move(ys), std::move(probs));
}

namespace {

using Complex = std::complex<double>;

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

// (e^{i t a_k} - f(t)) / t for every atom k, evaluated as
// sum_j p_j e^{i t (a_k + a_j)/2} i (a_k - a_j) sinc(t (a_k - a_j)/2),
// which has no cancellation near t = 0 and equals i (a_k - E a) at t = 0.
void centered_cf_over_t(double t, const std::vector<double>& a, const std::vector<double>& p, std::vector<Complex>& out) {
  const std::size_t s = a.size();
  for (std::size_t k = 0; k < s; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      const double diff = a[k] - a[j];
      if (diff == 0.0) continue;
      const double mid = 0.5 * t * (a[k] + a[j]);
      acc += p[j] * Complex(std::cos(mid), std::sin(mid)) * Complex(0.0, diff * sinc(0.5 * t * diff));
    }
    out[k] = acc;
  }
}

// h * sum over midpoints of w_k(t) conj(w_l(t)), where w = weight .* centered_cf_over_t.
Eigen::MatrixXcd outer_integral(const std::vector<double>& a, const std::vector<double>& p,
                                const std::vector<double>& weight, double truncation, double step) {
  const auto cells = static_cast<long long>(std::llround(2.0 * truncation / step));
  const double h = 2.0 * truncation / static_cast<double>(cells);
  const std::size_t s = a.size();
  const auto ss = static_cast<Eigen::Index>(s);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(ss, ss);
  std::vector<Complex> w(s);
  for (long long i = 0; i < cells; ++i) {
    const double t = -truncation + (static_cast<double>(i) + 0.5) * h;
    centered_cf_over_t(t, a, p, w);
    for (std::size_t k = 0; k < s; ++k) w[k] *= weight[k];
    for (Eigen::Index k = 0; k < ss; ++k) {
      for (Eigen::Index l = 0; l < ss; ++l) acc(k, l) += w[static_cast<std::size_t>(k)] * std::conj(w[static_cast<std::size_t>(l)]);
    }
  }
  return acc * h;
}

double cf_integral_at(const DiscreteJoint& joint, const CfIntegralConfig& cfg, double step) {
  const auto& p = joint.probs();
  std::vector<double> xs(joint.size()), ys(joint.size()), ones(joint.size(), 1.0);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    xs[i] = joint.xs()(static_cast<Eigen::Index>(i), 0);
    ys[i] = joint.ys()(static_cast<Eigen::Index>(i), 0);
  }
  // f_XY - f_X f_Y = sum_k p_k (e^{itx_k} - f_X(t)) (e^{isy_k} - f_Y(s)), so the
  // squared modulus separates into a t-integral and an s-integral per atom pair.
  const Eigen::MatrixXcd mt = outer_integral(xs, p, p, cfg.truncation, step);
  const Eigen::MatrixXcd ms = outer_integral(ys, p, ones, cfg.truncation, step);
  const double total = mt.cwiseProduct(ms).sum().real();
  return total / (cfg.c1 * cfg.c1);
}

void check_cf_inputs(const DiscreteJoint& joint, const CfIntegralConfig& cfg) {
  if (joint.p() != 1 || joint.q() != 1) fail(Errc::dimension_not_one, "characteristic-function oracle needs p = q = 1");
  if (!(cfg.truncation > 0.0) || !(cfg.step > 0.0) || !(cfg.step < cfg.truncation) || !(cfg.c1 > 0.0)) {
    fail(Errc::bad_config, "need T > 0, 0 < h < T and c1 > 0");
  }
}

}  // namespace

double cf_integral_v0_1d(const DiscreteJoint& joint, const CfIntegralConfig& cfg) {
  check_cf_inputs(joint, cfg);
  return cf_integral_at(joint, cfg, cfg.step);
}

CfConvergenceReport cf_integral_convergence(const DiscreteJoint& joint, const CfIntegralConfig& cfg) {
  check_cf_inputs(joint, cfg);
  CfConvergenceReport report;
  report.fine = cf_integral_at(joint, cfg, cfg.step);
  report.coarse = cf_integral_at(joint, cfg, 2.0 * cfg.step);
  report.richardson = report.fine + (report.fine - report.coarse) / 3.0;
  return report;
}

namespace {

Matrix brownian_kernel(const PointMatrix& atoms, const NormSpec& spec) {
  const DistanceMatrix d = pairwise_distance_matrix(atoms, spec);
  const auto s = static_cast<std::size_t>(atoms.rows());
  std::vector<double> radius(s);
  for (std::size_t i = 0; i < s; ++i) {
    const auto r = atoms.row(static_cast<Eigen::Index>(i));
    radius[i] = spec(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
  }
  Matrix k(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = radius[i] + radius[j] - d(i, j);
    }
  }
  return k;
}

Matrix double_center(const Matrix& k, const Vector& p) {
  const Vector row_mean = k * p;
  const double grand = p.dot(row_mean);
  Matrix c = k;
  c.colwise() -= row_mean;
  c.rowwise() -= row_mean.transpose();
  c.array() += grand;
  return c;
}

double weighted_frobenius(const Matrix& a, const Matrix& b, const std::vector<double>& p) {
  ExactSum acc;
  const auto s = a.rows();
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      acc.add(p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)] * a(i, j) * b(i, j));
    }
  }
  return acc.result();
}

}  // namespace

double brownian_kernel_v0(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y) {
  const Vector p = Eigen::Map<const Vector>(joint.probs().data(), static_cast<Eigen::Index>(joint.size()));
  const Matrix kx = double_center(brownian_kernel(joint.xs(), spec_x), p);
  const Matrix ky = double_center(brownian_kernel(joint.ys(), spec_y), p);
  return weighted_frobenius(kx, ky, joint.probs());
}

double brownian_kernel_uncentered(const DiscreteJoint& joint, const NormSpec& spec_x, const NormSpec& spec_y) {
  return weighted_frobenius(brownian_kernel(joint.xs(), spec_x), brownian_kernel(joint.ys(), spec_y), joint.probs());
}

}  // namespace depcov

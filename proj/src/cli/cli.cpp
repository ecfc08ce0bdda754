#include "depcov/cli.hpp"

#include "depcov/dcov.hpp"
#include "depcov/hilbert.hpp"
#include "depcov/inference.hpp"
#include "depcov/io.hpp"
#include "depcov/norms.hpp"
#include "depcov/parallel.hpp"
#include "depcov/population.hpp"
#include "depcov/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>

namespace depcov::cli {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::bad_config:
    case Errc::bad_replicate_count:
    case Errc::empty_basis:
      return kConfig;
    case Errc::file_error:
      return kFile;
    case Errc::parse_error:
      return kParse;
    case Errc::dimension_mismatch:
    case Errc::size_mismatch:
    case Errc::grid_mismatch:
    case Errc::length_mismatch:
    case Errc::empty_input:
    case Errc::dimension_not_one:
      return kDimension;
    case Errc::invalid_distribution:
    case Errc::support_too_large:
      return kDistribution;
    case Errc::not_symmetric:
    case Errc::not_positive_definite:
      return kMatrix;
  }
  return kInternal;
}

namespace {

struct CommonOptions {
  std::optional<std::size_t> threads;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

struct DataOptions {
  std::string x;
  std::string y;
  std::string paired;
  std::optional<std::size_t> xdim;
  std::string norm_x = "euclidean";
  std::string norm_y = "euclidean";
  bool functional = false;
  std::optional<std::size_t> trunc;
  std::string basis = "fourier";
  bool basis_orthonormal = false;
};

struct LoadedData {
  PairedSample sample;
  NormSpec norm_x = NormSpec::euclidean(1);
  NormSpec norm_y = NormSpec::euclidean(1);
};

// ---- helpers ------------------------------------------------------------

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto row = io::parse_rows(cell, what);
    if (row.size() != 1 || row[0].size() != 1) fail(Errc::bad_config, std::string(what) + ": bad number '" + cell + "'");
    out.push_back(row[0][0]);
  }
  if (out.empty()) fail(Errc::bad_config, std::string(what) + " is empty");
  return out;
}

NormSpec parse_norm(const std::string& text, std::size_t dim) {
  if (text.empty() || text == "euclidean") return NormSpec::euclidean(dim);
  Matrix weight;
  if (text.rfind("diag:", 0) == 0) {
    const auto d = parse_list(text.substr(5), "diagonal weight");
    weight = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) weight(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  } else {
    weight = io::read_matrix(text);
  }
  if (static_cast<std::size_t>(weight.rows()) != dim) {
    fail(Errc::dimension_mismatch, "norm '" + text + "' has dimension " + std::to_string(weight.rows()) +
                                       ", data has " + std::to_string(dim));
  }
  return NormSpec::weighted(weight);
}

Json norm_json(const NormSpec& spec) {
  Json j;
  j["kind"] = spec.kind_name();
  j["dim"] = spec.dim();
  if (spec.is_weighted()) {
    const Matrix& w = spec.weight();
    if (spec.is_diagonal()) {
      std::vector<double> d(static_cast<std::size_t>(w.rows()));
      for (Eigen::Index i = 0; i < w.rows(); ++i) d[static_cast<std::size_t>(i)] = w(i, i);
      j["diagonal"] = d;
    } else {
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(w.cols()));
        for (Eigen::Index c = 0; c < w.cols(); ++c) r[static_cast<std::size_t>(c)] = w(i, c);
        rows.push_back(r);
      }
      j["weight"] = rows;
    }
  }
  return j;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json data_config(const DataOptions& o) {
  Json j;
  j["x"] = o.x.empty() ? Json(nullptr) : Json(o.x);
  j["y"] = o.y.empty() ? Json(nullptr) : Json(o.y);
  j["paired"] = o.paired.empty() ? Json(nullptr) : Json(o.paired);
  j["xdim"] = optional_json(o.xdim);
  j["norm_x"] = o.norm_x;
  j["norm_y"] = o.norm_y;
  j["functional"] = o.functional;
  j["trunc"] = optional_json(o.trunc);
  j["basis"] = o.basis;
  j["basis_orthonormal"] = o.basis_orthonormal;
  return j;
}

BasisModel basis_for_grid(const DataOptions& o, const std::vector<double>& grid, std::size_t m) {
  BasisModel model;
  if (o.basis == "fourier" || o.basis == "legendre_mix" || o.basis == "monomial") {
    const auto uniform = uniform_grid(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::fabs(uniform[i] - grid[i]) > 1e-12) {
        fail(Errc::grid_mismatch, "built-in bases need a uniform grid on [0, 1]; use a basis file");
      }
    }
    std::vector<double> lambdas(m, 1.0);
    if (o.basis == "fourier") model = fourier_basis(lambdas, grid.size());
    else if (o.basis == "legendre_mix") model = legendre_mix_basis(lambdas, grid.size());
    else model = monomial_basis(lambdas, grid.size());
    validate_basis(model);
  } else {
    model = io::parse_basis(io::read_text(o.basis), o.basis_orthonormal, o.basis);
    if (model.grid.size() != grid.size()) fail(Errc::grid_mismatch, "basis grid does not match the data grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::fabs(model.grid[i] - grid[i]) > 1e-12) fail(Errc::grid_mismatch, "basis grid does not match the data grid");
    }
  }
  return model;
}

LoadedData load_data(const DataOptions& o) {
  const bool have_pair_files = !o.x.empty() || !o.y.empty();
  if (!o.paired.empty() && have_pair_files) fail(Errc::bad_config, "use either --paired or --x/--y, not both");
  if (o.paired.empty() && (o.x.empty() || o.y.empty())) fail(Errc::bad_config, "need --paired or both --x and --y");

  const bool custom_norm = o.norm_x != "euclidean" || o.norm_y != "euclidean";

  if (o.functional) {
    if (!o.paired.empty()) fail(Errc::bad_config, "functional data needs separate --x and --y files");
    if (custom_norm) fail(Errc::bad_config, "functional data uses the L2 norm (or the embedding's induced norm)");
    const io::FunctionalData fx = io::read_functional(o.x);
    const io::FunctionalData fy = io::read_functional(o.y);
    if (fx.values.rows() != fy.values.rows()) {
      fail(Errc::dimension_mismatch, "x has " + std::to_string(fx.values.rows()) + " samples, y has " +
                                         std::to_string(fy.values.rows()));
    }
    if (o.trunc) {
      const EmbeddingResult ex = embed(fx.values, basis_for_grid(o, fx.grid, *o.trunc), *o.trunc);
      const EmbeddingResult ey = embed(fy.values, basis_for_grid(o, fy.grid, *o.trunc), *o.trunc);
      return {PairedSample(ex.coeffs, ey.coeffs), ex.norm, ey.norm};
    }
    return {PairedSample(fx.values, fy.values), quadrature_norm(fx.grid), quadrature_norm(fy.grid)};
  }

  PairedSample sample;
  if (!o.paired.empty()) {
    sample = io::read_paired(o.paired, o.xdim);
  } else {
    io::CsvTable tx = io::read_csv(o.x);
    io::CsvTable ty = io::read_csv(o.y);
    sample = PairedSample(std::move(tx.values), std::move(ty.values));
  }
  if (o.trunc) {
    sample = PairedSample(ell2_truncate(sample.xs, *o.trunc).vectors, ell2_truncate(sample.ys, *o.trunc).vectors);
  }
  return {sample, parse_norm(o.norm_x, sample.p()), parse_norm(o.norm_y, sample.q())};
}

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--x", o.x, "CSV file of x observations (one row each)");
  cmd->add_option("--y", o.y, "CSV file of y observations (one row each)");
  cmd->add_option("--paired", o.paired, "CSV file with x1..xp,y1..yq columns");
  cmd->add_option("--xdim", o.xdim, "number of x columns in a header-less paired file");
  cmd->add_option("--norm-x", o.norm_x, "euclidean | diag:w1,w2,... | path to square weight CSV")->capture_default_str();
  cmd->add_option("--norm-y", o.norm_y, "euclidean | diag:w1,w2,... | path to square weight CSV")->capture_default_str();
  cmd->add_flag("--functional", o.functional, "inputs are grid-row functional files");
  cmd->add_option("--trunc", o.trunc, "truncation m (basis embedding for functional data, leading coordinates otherwise)");
  cmd->add_option("--basis", o.basis, "fourier | legendre_mix | monomial | basis file")->capture_default_str();
  cmd->add_flag("--basis-orthonormal", o.basis_orthonormal, "basis file is orthonormal");
}

std::uint64_t resolve_seed(const CommonOptions& common, std::ostream& err) {
  if (common.seed) return *common.seed;
  const std::uint64_t seed = entropy_seed();
  err << "depcov: no --seed given, using seed " << seed << "\n";
  return seed;
}

void check_format(const CommonOptions& common) {
  if (common.format != "json" && common.format != "csv") fail(Errc::bad_config, "--format must be json or csv");
}

void emit(const CommonOptions& common, const std::string& text, std::ostream& out) {
  if (common.out.empty()) {
    out << text;
  } else {
    io::write_text(common.out, text);
  }
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

std::string num(double v) { return io::format_double(v); }

// ---- commands ------------------------------------------------------------

int cmd_compute(const CommonOptions& common, const DataOptions& data, std::ostream& out) {
  check_format(common);
  const LoadedData loaded = load_data(data);
  const DcovEstimate e = v_n(loaded.sample, loaded.norm_x, loaded.norm_y);

  if (common.format == "csv") {
    emit(common,
         csv_line({"n", "p", "q", "t1", "t2", "t3", "v_xy", "v_xx", "v_yy", "r"}) +
             csv_line({std::to_string(e.n), std::to_string(loaded.sample.p()), std::to_string(loaded.sample.q()),
                       num(e.terms_xy.t1), num(e.terms_xy.t2), num(e.terms_xy.t3), num(e.v_xy), num(e.v_xx),
                       num(e.v_yy), num(e.r)}),
         out);
    return kOk;
  }
  Json j;
  j["command"] = "compute";
  j["n"] = e.n;
  j["p"] = loaded.sample.p();
  j["q"] = loaded.sample.q();
  j["t1"] = e.terms_xy.t1;
  j["t2"] = e.terms_xy.t2;
  j["t3"] = e.terms_xy.t3;
  j["v_xy"] = e.v_xy;
  j["v_xx"] = e.v_xx;
  j["v_yy"] = e.v_yy;
  j["r"] = e.r;
  j["norm_specs"] = {{"x", norm_json(loaded.norm_x)}, {"y", norm_json(loaded.norm_y)}};
  j["seed"] = nullptr;
  Json cfg = data_config(data);
  cfg["format"] = common.format;
  j["config"] = cfg;
  emit(common, j.dump(2) + "\n", out);
  return kOk;
}

struct TestOptions {
  std::size_t b = kDefaultReplicates;
  std::string statistic = "v";
  double alpha = kDefaultAlpha;
};

int cmd_test(const CommonOptions& common, const DataOptions& data, const TestOptions& t, std::ostream& out,
             std::ostream& err) {
  check_format(common);
  if (!(t.alpha > 0.0 && t.alpha < 1.0)) fail(Errc::bad_config, "--alpha must lie in (0, 1)");
  const StatisticKind kind = parse_statistic_kind(t.statistic);
  const LoadedData loaded = load_data(data);
  const std::uint64_t seed = resolve_seed(common, err);
  const PermutationTestResult res = permutation_test(loaded.sample, loaded.norm_x, loaded.norm_y, t.b, kind, seed);

  if (common.format == "csv") {
    emit(common,
         csv_line({"statistic", "observed", "p_value", "B", "seed", "n"}) +
             csv_line({to_string(kind), num(res.observed), num(res.p_value), std::to_string(res.b),
                       std::to_string(seed), std::to_string(loaded.sample.size())}),
         out);
    return kOk;
  }
  Json j;
  j["command"] = "test";
  j["statistic"] = to_string(kind);
  j["n"] = loaded.sample.size();
  j["p"] = loaded.sample.p();
  j["q"] = loaded.sample.q();
  j["observed"] = res.observed;
  j["p_value"] = res.p_value;
  j["B"] = res.b;
  j["alpha"] = t.alpha;
  j["rejected"] = res.p_value <= t.alpha;
  j["seed"] = seed;
  j["norm_specs"] = {{"x", norm_json(loaded.norm_x)}, {"y", norm_json(loaded.norm_y)}};
  j["replicates"] = res.replicates;
  Json cfg = data_config(data);
  cfg["B"] = t.b;
  cfg["statistic"] = to_string(kind);
  cfg["alpha"] = t.alpha;
  cfg["seed"] = seed;
  cfg["format"] = common.format;
  j["config"] = cfg;
  emit(common, j.dump(2) + "\n", out);
  return kOk;
}

struct OracleOptions {
  std::string joint;
  std::string norm_x = "euclidean";
  std::string norm_y = "euclidean";
  double cf_t = 200.0;
  double cf_h = 0.05;
  double c1 = std::numbers::pi;
  bool no_cf = false;
};

int cmd_oracle(const CommonOptions& common, const OracleOptions& o, std::ostream& out) {
  check_format(common);
  if (o.joint.empty()) fail(Errc::bad_config, "--joint is required");
  const DiscreteJoint joint = io::read_joint(o.joint);
  const NormSpec nx = parse_norm(o.norm_x, joint.p());
  const NormSpec ny = parse_norm(o.norm_y, joint.q());
  const PopulationDcov pop = v0_exact(joint, nx, ny);
  const double brownian = brownian_kernel_v0(joint, nx, ny);

  std::optional<CfConvergenceReport> cf;
  const bool cf_applicable = joint.p() == 1 && joint.q() == 1 && !nx.is_weighted() && !ny.is_weighted();
  if (cf_applicable && !o.no_cf) cf = cf_integral_convergence(joint, {o.cf_t, o.cf_h, o.c1});

  const double cf_delta = cf ? std::fabs(cf->fine - pop.v0) : 0.0;
  const double cf_rel = cf ? (pop.v0 > 0.0 ? cf_delta / pop.v0 : cf_delta) : 0.0;

  if (common.format == "csv") {
    emit(common,
         csv_line({"t10", "t20", "t30", "v0", "v0_x", "v0_y", "r0", "brownian_v0", "brownian_delta", "cf_value",
                   "cf_delta"}) +
             csv_line({num(pop.t10), num(pop.t20), num(pop.t30), num(pop.v0), num(pop.v0_x), num(pop.v0_y),
                       num(pop.r0), num(brownian), num(std::fabs(brownian - pop.v0)), cf ? num(cf->fine) : "",
                       cf ? num(cf_delta) : ""}),
         out);
    return kOk;
  }
  Json j;
  j["command"] = "oracle";
  j["atoms"] = joint.size();
  j["p"] = joint.p();
  j["q"] = joint.q();
  j["t10"] = pop.t10;
  j["t20"] = pop.t20;
  j["t30"] = pop.t30;
  j["v0"] = pop.v0;
  j["v0_x"] = pop.v0_x;
  j["v0_y"] = pop.v0_y;
  j["r0"] = pop.r0;
  j["factorizes"] = joint.factorizes();
  j["brownian_v0"] = brownian;
  j["brownian_delta"] = std::fabs(brownian - pop.v0);
  if (cf) {
    j["cf"] = {{"T", o.cf_t},          {"h", o.cf_h},   {"c1", o.c1},        {"value", cf->fine},
               {"coarse", cf->coarse}, {"richardson", cf->richardson}, {"delta", cf_delta}, {"relative_delta", cf_rel}};
  } else {
    j["cf"] = nullptr;
  }
  j["norm_specs"] = {{"x", norm_json(nx)}, {"y", norm_json(ny)}};
  j["seed"] = nullptr;
  j["config"] = {{"joint", o.joint}, {"norm_x", o.norm_x}, {"norm_y", o.norm_y}, {"cf_T", o.cf_t},
                 {"cf_h", o.cf_h},   {"c1", o.c1},         {"no_cf", o.no_cf}, {"format", common.format}};
  emit(common, j.dump(2) + "\n", out);
  return kOk;
}

struct SimulateOptions {
  std::string kind = "kl";
  std::size_t n = 100;
  std::size_t grid = kDefaultGridSize;
  std::string basis = "fourier";
  std::string lambda;
  double decay = 0.5;
  std::size_t terms = 20;
  std::string z = "standard_gaussian";
  std::size_t shared = 0;
  double noise_sd = 1.0;
  std::string manifest;
};

void load_manifest(SimulateOptions& s, CommonOptions& common, const std::string& path) {
  Json m;
  try {
    m = Json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path + ": " + e.what());
  }
  try {
    s.kind = m.at("kind").get<std::string>();
    s.n = m.at("n").get<std::size_t>();
    s.grid = m.at("grid_size").get<std::size_t>();
    s.basis = m.at("basis").get<std::string>();
    const auto lambdas = m.at("lambdas").get<std::vector<double>>();
    s.lambda.clear();
    for (std::size_t i = 0; i < lambdas.size(); ++i) s.lambda += (i ? "," : "") + io::format_double(lambdas[i]);
    s.z = m.at("z").get<std::string>();
    s.shared = m.at("shared_dim").get<std::size_t>();
    s.noise_sd = m.at("noise_sd").get<double>();
    common.seed = m.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path + ": manifest field missing or mistyped (" + e.what() + ")");
  }
}

int cmd_simulate(CommonOptions common, SimulateOptions s, std::ostream& out, std::ostream& err) {
  if (!s.manifest.empty()) load_manifest(s, common, s.manifest);
  if (common.out.empty()) fail(Errc::bad_config, "--out PREFIX is required for simulate");
  if (s.n == 0) fail(Errc::bad_config, "--n must be positive");
  const std::vector<double> lambdas = s.lambda.empty() ? geometric_lambdas(s.decay, s.terms) : parse_list(s.lambda, "--lambda");
  const ZDistribution z = parse_z_distribution(s.z);
  const std::uint64_t seed = resolve_seed(common, err);

  const std::string prefix = common.out;
  const std::string x_path = prefix + "_x.csv";
  const std::string y_path = prefix + "_y.csv";
  const std::string manifest_path = prefix + "_manifest.json";

  Json manifest;
  manifest["command"] = "simulate";
  manifest["kind"] = s.kind;
  manifest["n"] = s.n;
  manifest["seed"] = seed;
  manifest["basis"] = s.basis;
  manifest["grid_size"] = s.grid;
  manifest["lambdas"] = lambdas;
  manifest["z"] = to_string(z);
  manifest["shared_dim"] = s.shared;
  manifest["noise_sd"] = s.noise_sd;

  if (s.kind == "kl") {
    BasisModel model;
    if (s.basis == "fourier") model = fourier_basis(lambdas, s.grid);
    else if (s.basis == "legendre_mix") model = legendre_mix_basis(lambdas, s.grid);
    else if (s.basis == "monomial") model = monomial_basis(lambdas, s.grid);
    else fail(Errc::bad_config, "unknown basis '" + s.basis + "'");
    validate_basis(model);
    const KlPair pair = simulate_kl_pair(model, s.n, z, s.shared, s.noise_sd, seed);
    io::write_text(x_path, io::format_functional({model.grid, pair.x.values}));
    io::write_text(y_path, io::format_functional({model.grid, pair.y.values}));
    manifest["format"] = "functional";
  } else if (s.kind == "ell2") {
    FiniteDependenceConfig cfg;
    cfg.shared_dim = s.shared;
    cfg.lambdas = lambdas;
    cfg.noise_sd = s.noise_sd;
    cfg.z = z;
    const PairedSample sample = finite_dependence_sample(cfg, s.n, seed);
    std::vector<std::string> hx, hy;
    for (std::size_t i = 1; i <= sample.p(); ++i) hx.push_back("x" + std::to_string(i));
    for (std::size_t i = 1; i <= sample.q(); ++i) hy.push_back("y" + std::to_string(i));
    io::write_text(x_path, io::format_rows(sample.xs, hx));
    io::write_text(y_path, io::format_rows(sample.ys, hy));
    manifest["format"] = "vectors";
    manifest["grid_size"] = 0;
    manifest["basis"] = "none";
  } else {
    fail(Errc::bad_config, "--kind must be kl or ell2");
  }
  manifest["files"] = {{"x", fs::path(x_path).filename().string()}, {"y", fs::path(y_path).filename().string()}};

  const std::string text = manifest.dump(2) + "\n";
  io::write_text(manifest_path, text);
  out << text;
  return kOk;
}

struct PowerOptions {
  std::string scenario = "independent";
  std::size_t dim = 5;
  std::size_t coord = 1;
  std::size_t shared = 1;
  double noise_sd = 1.0;
  std::size_t n = 100;
  std::size_t b = kDefaultReplicates;
  std::size_t reps = 100;
  double alpha = kDefaultAlpha;
  double confidence = 0.95;
  std::string statistic = "r";
  std::vector<std::string> norms;
  std::string emphasis;
};

int cmd_power(const CommonOptions& common, const PowerOptions& o, std::ostream& out, std::ostream& err) {
  check_format(common);
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) fail(Errc::bad_config, "--alpha must lie in (0, 1)");
  if (o.coord == 0 || o.coord > o.dim) fail(Errc::bad_config, "--coord must lie in 1..dim");

  PowerStudyConfig cfg;
  cfg.scenario.kind = parse_scenario_kind(o.scenario);
  cfg.scenario.dim = o.dim;
  cfg.scenario.dependent_coordinate = o.coord - 1;
  cfg.scenario.shared_dim = o.shared;
  cfg.scenario.noise_sd = o.noise_sd;
  cfg.n = o.n;
  cfg.b = o.b;
  cfg.replications = o.reps;
  cfg.alpha = o.alpha;
  cfg.confidence = o.confidence;
  cfg.kind = parse_statistic_kind(o.statistic);

  for (const auto& entry : o.norms) {
    const auto a = entry.find('|');
    const auto b = a == std::string::npos ? a : entry.find('|', a + 1);
    if (b == std::string::npos) fail(Errc::bad_config, "--norm expects LABEL|XSPEC|YSPEC, got '" + entry + "'");
    cfg.norms.push_back({entry.substr(0, a), parse_norm(entry.substr(a + 1, b - a - 1), o.dim),
                         parse_norm(entry.substr(b + 1), o.dim)});
  }
  if (!o.emphasis.empty()) {
    for (double w : parse_list(o.emphasis, "--emphasis")) {
      Matrix a = Matrix::Identity(static_cast<Eigen::Index>(o.dim), static_cast<Eigen::Index>(o.dim));
      a(static_cast<Eigen::Index>(o.coord - 1), static_cast<Eigen::Index>(o.coord - 1)) = w;
      cfg.norms.push_back({"w=" + io::format_double(w), NormSpec::weighted(a), NormSpec::weighted(a)});
    }
  }
  if (cfg.norms.empty()) cfg.norms.push_back({"euclidean", NormSpec::euclidean(o.dim), NormSpec::euclidean(o.dim)});
  cfg.seed = resolve_seed(common, err);

  const PowerStudyReport report = power_study(cfg);

  if (common.format == "csv") {
    std::string text = csv_line({"label", "rejections", "replications", "rate", "ci_low", "ci_high"});
    for (const auto& row : report.rows) {
      text += csv_line({row.label, std::to_string(row.rejections), std::to_string(cfg.replications), num(row.rate),
                        num(row.ci.lo), num(row.ci.hi)});
    }
    emit(common, text, out);
    return kOk;
  }
  Json j;
  j["command"] = "power";
  j["scenario"] = {{"kind", o.scenario},
                   {"dim", o.dim},
                   {"dependent_coordinate", o.coord},
                   {"shared_dim", o.shared},
                   {"noise_sd", o.noise_sd}};
  j["structure"] = report.structure;
  j["n"] = cfg.n;
  j["B"] = cfg.b;
  j["replications"] = cfg.replications;
  j["alpha"] = cfg.alpha;
  j["confidence"] = cfg.confidence;
  j["statistic"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  Json rows = Json::array();
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& row = report.rows[k];
    rows.push_back({{"label", row.label},
                    {"x_norm", norm_json(cfg.norms[k].x)},
                    {"y_norm", norm_json(cfg.norms[k].y)},
                    {"rejections", row.rejections},
                    {"rate", row.rate},
                    {"ci_low", row.ci.lo},
                    {"ci_high", row.ci.hi}});
  }
  j["rows"] = rows;
  j["config"] = {{"scenario", o.scenario}, {"dim", o.dim},         {"coord", o.coord},
                 {"shared", o.shared},     {"noise_sd", o.noise_sd}, {"n", o.n},
                 {"B", o.b},               {"reps", o.reps},       {"alpha", o.alpha},
                 {"confidence", o.confidence}, {"statistic", o.statistic}, {"norms", o.norms},
                 {"emphasis", o.emphasis}, {"seed", cfg.seed},     {"format", common.format}};
  emit(common, j.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized distance covariance, correlation and independence tests"};
  app.name("depcov");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--threads", common.threads, "cap on worker threads (default: DEPCOV_THREADS or all cores)");
  app.add_option("--out", common.out, "write the report to this file (simulate: output prefix)");
  app.add_option("--format", common.format, "json | csv")->capture_default_str();
  app.add_option("--seed", common.seed, "seed for all randomness (drawn from entropy when absent)");

  DataOptions compute_data, test_data;
  auto* compute = app.add_subcommand("compute", "sample distance covariance and correlation");
  add_data_options(compute, compute_data);

  TestOptions test_opts;
  auto* test = app.add_subcommand("test", "permutation independence test");
  add_data_options(test, test_data);
  test->add_option("--B", test_opts.b, "number of permutation replicates")->capture_default_str();
  test->add_option("--statistic", test_opts.statistic, "v | r")->capture_default_str();
  test->add_option("--alpha", test_opts.alpha, "level used for the 'rejected' field")->capture_default_str();

  OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "exact population values for a discrete joint");
  oracle->add_option("--joint", oracle_opts.joint, "joint distribution JSON")->required();
  oracle->add_option("--norm-x", oracle_opts.norm_x, "euclidean | diag:... | weight CSV")->capture_default_str();
  oracle->add_option("--norm-y", oracle_opts.norm_y, "euclidean | diag:... | weight CSV")->capture_default_str();
  oracle->add_option("--cf-T", oracle_opts.cf_t, "characteristic-function truncation")->capture_default_str();
  oracle->add_option("--cf-h", oracle_opts.cf_h, "characteristic-function grid step")->capture_default_str();
  oracle->add_option("--c1", oracle_opts.c1, "weight constant for p = q = 1")->capture_default_str();
  oracle->add_flag("--no-cf", oracle_opts.no_cf, "skip the characteristic-function cross-check");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "generate functional or l2 finite-dependence datasets");
  simulate->add_option("--kind", sim.kind, "kl | ell2")->capture_default_str();
  simulate->add_option("--n", sim.n, "number of pairs")->capture_default_str();
  simulate->add_option("--grid", sim.grid, "grid points for functional data")->capture_default_str();
  simulate->add_option("--basis", sim.basis, "fourier | legendre_mix | monomial")->capture_default_str();
  simulate->add_option("--lambda", sim.lambda, "comma-separated lambda_i (overrides --decay/--terms)");
  simulate->add_option("--decay", sim.decay, "lambda_i = decay^i")->capture_default_str();
  simulate->add_option("--terms", sim.terms, "number of expansion terms")->capture_default_str();
  simulate->add_option("--z", sim.z, "rademacher | standard_gaussian")->capture_default_str();
  simulate->add_option("--shared", sim.shared, "leading latent coordinates shared by X and Y")->capture_default_str();
  simulate->add_option("--noise-sd", sim.noise_sd, "noise on shared coordinates")->capture_default_str();
  simulate->add_option("--manifest", sim.manifest, "re-run from a manifest written by a previous run");

  PowerOptions power_opts;
  auto* power = app.add_subcommand("power", "rejection rates of the permutation test across norm choices");
  power->add_option("--scenario", power_opts.scenario, "independent | identity | single_coordinate | finite_dependence")
      ->capture_default_str();
  power->add_option("--dim", power_opts.dim, "dimension of X and Y")->capture_default_str();
  power->add_option("--coord", power_opts.coord, "dependent coordinate (1-based)")->capture_default_str();
  power->add_option("--shared", power_opts.shared, "shared latent coordinates (finite_dependence)")->capture_default_str();
  power->add_option("--noise-sd", power_opts.noise_sd, "noise on dependent coordinates")->capture_default_str();
  power->add_option("--n", power_opts.n, "sample size")->capture_default_str();
  power->add_option("--B", power_opts.b, "permutation replicates per test")->capture_default_str();
  power->add_option("--reps", power_opts.reps, "simulated datasets")->capture_default_str();
  power->add_option("--alpha", power_opts.alpha, "test level")->capture_default_str();
  power->add_option("--confidence", power_opts.confidence, "Clopper-Pearson level")->capture_default_str();
  power->add_option("--statistic", power_opts.statistic, "v | r")->capture_default_str();
  power->add_option("--norm", power_opts.norms, "LABEL|XSPEC|YSPEC, repeatable");
  power->add_option("--emphasis", power_opts.emphasis, "weights w for A = B = diag(1,..,w at --coord,..,1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "depcov: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (common.threads) {
      if (*common.threads == 0) fail(Errc::bad_config, "--threads must be positive");
      set_thread_limit(*common.threads);
    } else {
      reset_thread_limit();
    }
    if (compute->parsed()) return cmd_compute(common, compute_data, out);
    if (test->parsed()) return cmd_test(common, test_data, test_opts, out, err);
    if (oracle->parsed()) return cmd_oracle(common, oracle_opts, out);
    if (simulate->parsed()) return cmd_simulate(common, sim, out, err);
    if (power->parsed()) return cmd_power(common, power_opts, out, err);
  } catch (const Error& e) {
    err << "depcov: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "depcov: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace depcov::cli

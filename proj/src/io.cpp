#include "depcov/io.hpp"

#include "depcov/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace depcov::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++number;
    const auto t = trim(raw);
    if (!t.empty() && t.front() != '#') lines.push_back({number, t});
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, std::size_t column, const std::string& what) {
  fail(Errc::parse_error,
       std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

std::vector<double> parse_numeric_line(const Line& line, std::string_view source) {
  std::vector<double> row;
  const auto cells = split(line.text);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto v = parse_number(cells[c]);
    if (!v) parse_fail(source, line.number, c + 1, "not a number: '" + std::string(trim(cells[c])) + "'");
    row.push_back(*v);
  }
  return row;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::file_error, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::file_error, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(Errc::file_error, "failed writing '" + path.string() + "'");
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
  const auto lines = content_lines(text);
  if (lines.empty()) fail(Errc::empty_input, std::string(source) + " has no data rows");

  CsvTable table;
  std::size_t first = 0;
  const auto head = split(lines[0].text);
  bool is_header = false;
  for (auto cell : head) {
    if (!parse_number(cell)) is_header = true;
  }
  if (is_header) {
    for (auto cell : head) table.header.emplace_back(trim(cell));
    first = 1;
  }
  if (first >= lines.size()) fail(Errc::empty_input, std::string(source) + " has a header but no data rows");

  const std::size_t width = split(lines[first].text).size();
  if (is_header && width != table.header.size()) {
    parse_fail(source, lines[first].number, 1,
               "expected " + std::to_string(table.header.size()) + " columns, found " + std::to_string(width));
  }
  table.values.resize(static_cast<Eigen::Index>(lines.size() - first), static_cast<Eigen::Index>(width));
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto row = parse_numeric_line(lines[i], source);
    if (row.size() != width) {
      parse_fail(source, lines[i].number, std::min(row.size(), width) + 1,
                 "expected " + std::to_string(width) + " columns, found " + std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<Eigen::Index>(i - first), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

std::vector<std::vector<double>> parse_rows(std::string_view text, std::string_view source) {
  std::vector<std::vector<double>> rows;
  for (const auto& line : content_lines(text)) rows.push_back(parse_numeric_line(line, source));
  return rows;
}

PairedSample read_paired(const std::filesystem::path& path, std::optional<std::size_t> xdim) {
  const CsvTable table = read_csv(path);
  const auto cols = static_cast<std::size_t>(table.values.cols());
  std::size_t p = 0;
  if (!table.header.empty()) {
    while (p < cols && !table.header[p].empty() && (table.header[p][0] == 'x' || table.header[p][0] == 'X')) ++p;
    for (std::size_t c = p; c < cols; ++c) {
      if (table.header[c].empty() || (table.header[c][0] != 'y' && table.header[c][0] != 'Y')) {
        fail(Errc::parse_error, path.string() + ": header must list x columns then y columns");
      }
    }
    if (xdim && *xdim != p) fail(Errc::dimension_mismatch, "header gives " + std::to_string(p) + " x columns");
  } else if (xdim) {
    p = *xdim;
  } else if (cols == 2) {
    p = 1;
  } else {
    fail(Errc::parse_error, path.string() + ": cannot split " + std::to_string(cols) +
                                " columns into x and y; add an x1..xp,y1..yq header");
  }
  if (p == 0 || p >= cols) fail(Errc::dimension_mismatch, path.string() + ": need at least one x and one y column");
  const auto pp = static_cast<Eigen::Index>(p);
  return PairedSample(table.values.leftCols(pp), table.values.rightCols(table.values.cols() - pp));
}

Matrix read_matrix(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (!table.header.empty()) fail(Errc::parse_error, path.string() + ": matrix file must not have a header");
  if (table.values.rows() != table.values.cols()) {
    fail(Errc::dimension_mismatch, path.string() + ": matrix is " + std::to_string(table.values.rows()) + "x" +
                                       std::to_string(table.values.cols()) + ", expected square");
  }
  return table.values;
}

FunctionalData parse_functional(std::string_view text, std::string_view source) {
  CsvTable table = parse_csv(text, source);
  if (!table.header.empty()) fail(Errc::parse_error, std::string(source) + ": functional file starts with the grid row");
  if (table.values.rows() < 2) fail(Errc::empty_input, std::string(source) + ": needs a grid row and at least one sample");
  FunctionalData data;
  data.grid.assign(table.values.row(0).data(), table.values.row(0).data() + table.values.cols());
  for (std::size_t i = 1; i < data.grid.size(); ++i) {
    if (!(data.grid[i] > data.grid[i - 1])) fail(Errc::grid_mismatch, std::string(source) + ": grid must be strictly increasing");
  }
  data.values = table.values.bottomRows(table.values.rows() - 1);
  return data;
}

FunctionalData read_functional(const std::filesystem::path& path) {
  return parse_functional(read_text(path), path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_rows(const PointMatrix& values, const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ',';
      out += header[c];
    }
    out += '\n';
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(i, c));
    }
    out += '\n';
  }
  return out;
}

std::string format_functional(const FunctionalData& data) {
  PointMatrix grid(1, static_cast<Eigen::Index>(data.grid.size()));
  for (std::size_t i = 0; i < data.grid.size(); ++i) grid(0, static_cast<Eigen::Index>(i)) = data.grid[i];
  return format_rows(grid) + format_rows(data.values);
}

BasisModel parse_basis(std::string_view text, bool orthonormal, std::string_view source) {
  const auto rows = parse_rows(text, source);
  if (rows.size() < 3) fail(Errc::parse_error, std::string(source) + ": basis file needs grid, lambda and basis rows");
  BasisModel model;
  model.id = "file:" + std::string(source);
  model.grid = rows[0];
  model.lambdas = rows[1];
  model.orthonormal = orthonormal;
  const std::size_t m = rows.size() - 2;
  if (model.lambdas.size() != m) {
    fail(Errc::length_mismatch, std::string(source) + ": " + std::to_string(model.lambdas.size()) + " lambdas for " +
                                    std::to_string(m) + " basis functions");
  }
  model.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(model.grid.size()));
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i + 2].size() != model.grid.size()) {
      fail(Errc::grid_mismatch, std::string(source) + ": basis row " + std::to_string(i + 1) + " does not match the grid");
    }
    for (std::size_t j = 0; j < model.grid.size(); ++j) {
      model.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i + 2][j];
    }
  }
  validate_basis(model);
  return model;
}

namespace {

std::vector<double> coordinates(const nlohmann::json& v, const char* name) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) fail(Errc::parse_error, std::string("atom field '") + name + "' must be a number or array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(Errc::parse_error, std::string("atom field '") + name + "' has a non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

DiscreteJoint joint_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array()) {
    fail(Errc::parse_error, "joint document needs an 'atoms' array");
  }
  const auto& atoms = doc["atoms"];
  if (atoms.empty()) fail(Errc::invalid_distribution, "joint has no atoms");
  std::vector<std::vector<double>> xs, ys;
  std::vector<double> probs;
  for (const auto& atom : atoms) {
    if (!atom.is_object() || !atom.contains("x") || !atom.contains("y") || !atom.contains("p")) {
      fail(Errc::parse_error, "each atom needs 'x', 'y' and 'p'");
    }
    if (!atom["p"].is_number()) fail(Errc::parse_error, "atom probability must be a number");
    xs.push_back(coordinates(atom["x"], "x"));
    ys.push_back(coordinates(atom["y"], "y"));
    probs.push_back(atom["p"].get<double>());
  }
  const std::size_t p = xs.front().size();
  const std::size_t q = ys.front().size();
  PointMatrix mx(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(p));
  PointMatrix my(static_cast<Eigen::Index>(ys.size()), static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != p || ys[i].size() != q) fail(Errc::dimension_mismatch, "atoms have inconsistent dimensions");
    for (std::size_t j = 0; j < p; ++j) mx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xs[i][j];
    for (std::size_t j = 0; j < q; ++j) my(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ys[i][j];
  }
  if (p == 0 || q == 0) fail(Errc::dimension_mismatch, "atom coordinates must be non-empty");
  return DiscreteJoint(std::move(mx), std::move(my), std::move(probs));
}

DiscreteJoint read_joint(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::parse_error, path.string() + ": " + e.what());
  }
  return joint_from_json(doc);
}

nlohmann::json joint_to_json(const DiscreteJoint& joint) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<double> x(joint.xs().row(r).data(), joint.xs().row(r).data() + joint.p());
    std::vector<double> y(joint.ys().row(r).data(), joint.ys().row(r).data() + joint.q());
    atoms.push_back({{"x", x}, {"y", y}, {"p", joint.probs()[i]}});
  }
  return {{"atoms", atoms}};
}

}  // namespace depcov::io

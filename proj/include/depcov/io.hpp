#pragma once

#include "depcov/dcov.hpp"
#include "depcov/hilbert.hpp"
#include "depcov/population.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace depcov::io {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  PointMatrix values;
};

/// Comma-separated numeric table with an optional header row. Blank lines and
/// lines starting with '#' are skipped. Ragged rows and non-numeric cells
/// raise ParseError naming the line and column.
CsvTable parse_csv(std::string_view text, std::string_view source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

/// Rows of numbers that may differ in length (basis files).
std::vector<std::vector<double>> parse_rows(std::string_view text, std::string_view source = "<input>");

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Paired table split into x and y columns. Header columns named x* / y*
/// decide the split; without a header, xdim gives it (or 1 for two columns).
PairedSample read_paired(const std::filesystem::path& path, std::optional<std::size_t> xdim = std::nullopt);

/// Square matrix written as plain CSV.
Matrix read_matrix(const std::filesystem::path& path);

/// First row = grid, every following row = one tabulated function.
struct FunctionalData {
  std::vector<double> grid;
  PointMatrix values;
};

FunctionalData parse_functional(std::string_view text, std::string_view source = "<input>");
FunctionalData read_functional(const std::filesystem::path& path);
std::string format_functional(const FunctionalData& data);

/// Basis file: row 1 grid, row 2 lambdas, then one row per basis function.
BasisModel parse_basis(std::string_view text, bool orthonormal, std::string_view source = "<input>");

/// {"atoms": [{"x": [...], "y": [...], "p": r}, ...]}; scalars are accepted
/// for one-dimensional coordinates.
DiscreteJoint joint_from_json(const nlohmann::json& doc);
DiscreteJoint read_joint(const std::filesystem::path& path);
nlohmann::json joint_to_json(const DiscreteJoint& joint);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
std::string format_rows(const PointMatrix& values, const std::vector<std::string>& header = {});

}  // namespace depcov::io

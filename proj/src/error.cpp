#include "depcov/error.hpp"

namespace depcov {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::empty_input: return "EmptyInput";
    case Errc::size_mismatch: return "SizeMismatch";
    case Errc::not_symmetric: return "NotSymmetric";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::invalid_distribution: return "InvalidDistribution";
    case Errc::support_too_large: return "SupportTooLarge";
    case Errc::dimension_not_one: return "DimensionNotOne";
    case Errc::bad_config: return "BadConfig";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_basis: return "EmptyBasis";
    case Errc::bad_replicate_count: return "BadB";
    case Errc::parse_error: return "ParseError";
    case Errc::file_error: return "FileError";
  }
  return "Unknown";
}

void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace depcov

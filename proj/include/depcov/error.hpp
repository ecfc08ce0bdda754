#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace depcov {

enum class Errc {
  dimension_mismatch,
  empty_input,
  size_mismatch,
  not_symmetric,
  not_positive_definite,
  invalid_distribution,
  support_too_large,
  dimension_not_one,
  bad_config,
  grid_mismatch,
  length_mismatch,
  empty_basis,
  bad_replicate_count,
  parse_error,
  file_error,
};

std::string_view to_string(Errc code);

/// Exception carrying a machine-readable error category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace depcov

#pragma once

#include <stdexcept>
#include <string>

namespace hlyap {

enum class ErrorCode {
  invalid_argument,
  singular_matrix,
  leaves_chart,
  not_interior,
  not_biproximal,
  not_diagonalizable,
  no_proximal_elements,
  degenerate,
  unbounded,
  search_exhausted,
  window_too_narrow,
  insufficient_samples,
  tangent_estimation,
  malformed_input,
  numerical,
};

const char* to_string(ErrorCode code);

/// Library-wide exception; `code()` lets front ends map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hlyap

#include "hlyap/error.hpp"

namespace hlyap {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::singular_matrix: return "singular matrix";
    case ErrorCode::leaves_chart: return "leaves chart";
    case ErrorCode::not_interior: return "not interior";
    case ErrorCode::not_biproximal: return "not biproximal";
    case ErrorCode::not_diagonalizable: return "not diagonalizable";
    case ErrorCode::no_proximal_elements: return "no proximal elements";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::unbounded: return "unbounded";
    case ErrorCode::search_exhausted: return "search exhausted";
    case ErrorCode::window_too_narrow: return "window too narrow";
    case ErrorCode::insufficient_samples: return "insufficient samples";
    case ErrorCode::tangent_estimation: return "tangent estimation";
    case ErrorCode::malformed_input: return "malformed input";
    case ErrorCode::numerical: return "numerical failure";
  }
  return "unknown";
}

}  // namespace hlyap

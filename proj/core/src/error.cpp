#include "coalesce/error.hpp"

namespace coalesce {

std::string_view error_token(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::not_bracketed: return "not_bracketed";
    case ErrorKind::above_threshold: return "above_threshold";
    case ErrorKind::divergent_sensitivity: return "divergent_sensitivity";
    case ErrorKind::edge_truncation: return "edge_truncation";
    case ErrorKind::pair_identification: return "pair_identification";
    case ErrorKind::internal_consistency: return "internal_consistency";
  }
  return "unknown";
}

}  // namespace coalesce

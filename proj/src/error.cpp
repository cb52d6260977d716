#include "hfam/error.hpp"

namespace hfam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kLoop: return "loop";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kMismatchedOrder: return "mismatched-n";
    case ErrorCode::kEmptyGraph: return "empty-graph";
    case ErrorCode::kCapExceeded: return "cap-exceeded";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kUnsupportedSize: return "unsupported-size";
    case ErrorCode::kNotBijection: return "non-bijection";
    case ErrorCode::kInvalidProbability: return "invalid-p";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kOrdering: return "ordering";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kWitnessNotFound: return "witness-not-found";
  }
  return "unknown";
}

}  // namespace hfam

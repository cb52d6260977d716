#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hfam {

enum class ErrorCode {
  kCapacity,        // more than 64 vertices
  kLoop,            // self-loop requested
  kRange,           // vertex / value outside its domain
  kMismatchedOrder, // graphs with different vertex counts
  kEmptyGraph,      // operation needs at least one vertex
  kCapExceeded,     // a configured feasibility cap was hit
  kMalformed,       // unparseable text input
  kUnsupportedSize, // valid graph6 header we do not support
  kNotBijection,
  kInvalidProbability,
  kDomain,
  kOrdering,
  kNotFound,
  kInfeasible,
  kWitnessNotFound,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hfam

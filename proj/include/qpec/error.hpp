// Copyright 2026 The qpec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qpec {

enum class Errc {
  invalid_dimension,
  invalid_input,
  invalid_parameter,
  invalid_spec,
  theorem_inapplicable,
  non_invertible_channel,
  rank_deficient_basis,
  target_outside_span,
  solver_failure,
  resource_limit,
  /// Malformed text or JSON input (noise specs, ranges, files).
  parse_error,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::invalid_input: return "invalid-input";
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::invalid_spec: return "invalid-spec";
    case Errc::theorem_inapplicable: return "theorem-inapplicable";
    case Errc::non_invertible_channel: return "non-invertible-channel";
    case Errc::rank_deficient_basis: return "rank-deficient-basis";
    case Errc::target_outside_span: return "target-outside-span";
    case Errc::solver_failure: return "solver-failure";
    case Errc::resource_limit: return "resource-limit";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

/// Domain errors are caller mistakes (bad parameters, shapes, hypotheses).
/// Everything else is a numerical failure of an otherwise valid request.
inline bool is_domain_error(Errc code) {
  switch (code) {
    case Errc::invalid_dimension:
    case Errc::invalid_input:
    case Errc::invalid_parameter:
    case Errc::invalid_spec:
    case Errc::theorem_inapplicable:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qpec

// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef WPCN_ERROR_HPP
#define WPCN_ERROR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace wpcn {

/// Thrown when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an iterative procedure exhausts its iteration budget.
class IterationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw DomainError(std::string(name) + " must be finite");
}

inline void require_positive(double x, const char* name) {
  if (!std::isfinite(x) || !(x > 0.0)) throw DomainError(std::string(name) + " must be positive and finite");
}

inline void require_nonnegative(double x, const char* name) {
  if (!std::isfinite(x) || x < 0.0) throw DomainError(std::string(name) + " must be nonnegative and finite");
}

inline void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace detail
}  // namespace wpcn

#endif  // WPCN_ERROR_HPP

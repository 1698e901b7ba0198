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

#include "wpcn/error.hpp"
#include "wpcn/wit.hpp"

#include <algorithm>
#include <cmath>

namespace wpcn {

namespace {

constexpr long kMaxFixedPointIterations = 1000;

void require_fixed_point_args(double u, long num_devices, double eps) {
  detail::require(num_devices >= 2, "the pilot fixed point needs at least two devices");
  detail::require(u > 0.0 && u < 1.0, "u must lie in (0, 1)");
  detail::require(eps >= 0.0 && eps < 1.0, "epsilon must lie in [0, 1)");
}

// g(u) = (1 - u) / (1 - u^S), with 1 - u^S evaluated without cancellation.
double g_of(double u, long s) { return (1.0 - u) / -std::expm1(static_cast<double>(s) * std::log(u)); }

}  // namespace

double active_probability(const DiscreteExp& traffic, double slot_time, double coherence_time) {
  detail::require_positive(slot_time, "slot_time");
  detail::require_positive(coherence_time, "coherence_time");
  detail::require(slot_time <= coherence_time, "slot_time must not exceed coherence_time");
  return slot_time / coherence_time * -std::expm1(-traffic.rate());
}

double collision_probability(long num_devices, long num_pilots, const DiscreteExp& traffic, double slot_time,
                             double coherence_time) {
  detail::require(num_devices >= 1, "num_devices must be at least 1");
  detail::require(num_pilots >= 1 && num_pilots <= num_devices, "the number of pilots must lie in [1, S]");
  const double q = active_probability(traffic, slot_time, coherence_time);
  if (num_devices == 1) return 0.0;
  // Per-pilot activity x; a tagged active device collides unless it is alone on its pilot.
  const double s = static_cast<double>(num_devices);
  const double x = q / static_cast<double>(num_pilots);
  const double log_1mx = std::log1p(-x);
  const double alone = s * x * std::exp((s - 1.0) * log_1mx);
  const double any = -std::expm1(s * log_1mx);
  return std::clamp(1.0 - alone / any, 0.0, 1.0);
}

double pilot_fixed_point_map(double u, long num_devices, double eps) {
  require_fixed_point_args(u, num_devices, eps);
  const double s = static_cast<double>(num_devices);
  return std::exp((std::log((1.0 - eps) / s) - std::log(g_of(u, num_devices))) / (s - 1.0));
}

double pilot_fixed_point_slope(double u, long num_devices, double eps) {
  require_fixed_point_args(u, num_devices, eps);
  const double s = static_cast<double>(num_devices);
  const double us = std::exp(s * std::log(u));
  const double one_minus_us = -std::expm1(s * std::log(u));
  const double dg = (s * us / u * (1.0 - u) - one_minus_us) / (one_minus_us * one_minus_us);
  const double g = g_of(u, num_devices);
  return std::pow((1.0 - eps) / s, 1.0 / (s - 1.0)) * std::pow(g, -1.0 - 1.0 / (s - 1.0)) * std::abs(dg) / (s - 1.0);
}

PilotPlan optimal_pilot_count(long num_devices, double eps, const DiscreteExp& traffic, double slot_time,
                              double coherence_time, double tol) {
  detail::require(num_devices >= 1, "num_devices must be at least 1");
  detail::require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0, 1)");
  detail::require_positive(tol, "tolerance");
  const double q = active_probability(traffic, slot_time, coherence_time);

  PilotPlan plan;
  plan.target_collision = eps;
  if (num_devices == 1) {
    plan.num_sequences = 1;
    plan.initial_guess = 1;
    plan.reuse_factor = 1.0;
    return plan;
  }

  const double s = static_cast<double>(num_devices);
  double u = std::pow(s / (1.0 - eps) - 1.0, -1.0 / (s - 1.0));
  long iter = 0;
  for (;;) {
    if (iter == kMaxFixedPointIterations) {
      throw IterationLimitError("pilot fixed point did not settle within " + std::to_string(kMaxFixedPointIterations) +
                                " iterations");
    }
    const double next = pilot_fixed_point_map(u, num_devices, eps);
    ++iter;
    const double du = std::abs(next - u);
    u = next;
    if (du <= tol) break;
  }
  plan.iterations_used = iter;

  const double raw = 1.0 - u > 0.0 ? std::ceil(q / (1.0 - u)) : s;
  plan.initial_guess = static_cast<long>(std::clamp(raw, 1.0, s));

  // The fixed point solves the relaxed equality only up to `tol`, so L_0 can land
  // on either side of the boundary; O_col is monotone in L, so walk to the edge.
  auto feasible = [&](long l) {
    return l == num_devices || collision_probability(num_devices, l, traffic, slot_time, coherence_time) <= eps;
  };
  long l = plan.initial_guess;
  while (!feasible(l)) ++l;
  while (l > 1 && feasible(l - 1)) --l;

  plan.num_sequences = l;
  plan.reuse_factor = static_cast<double>(l) / s;
  plan.collision = l == num_devices ? 0.0 : collision_probability(num_devices, l, traffic, slot_time, coherence_time);
  return plan;
}

}  // namespace wpcn

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

#include "oracles.hpp"
#include "wpcn/error.hpp"
#include "wpcn/wit.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace wpcn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kSlot = 0.02;
constexpr double kBlock = 0.4;

// Straight transcription with plain pow, as an independent evaluation. It loses
// about eight digits to cancellation when x is tiny.
double collision_formula(long s, long l, double lambda) {
  const double x = kSlot / (static_cast<double>(l) * kBlock) * (1.0 - std::exp(-lambda));
  const double sd = static_cast<double>(s);
  return 1.0 - sd * x * std::pow(1.0 - x, sd - 1.0) / (1.0 - std::pow(1.0 - x, sd));
}

// Smallest feasible L by exhaustive search.
long linear_search_pilots(long s, double eps, const DiscreteExp& traffic) {
  for (long l = 1; l < s; ++l) {
    if (collision_probability(s, l, traffic, kSlot, kBlock) <= eps) return l;
  }
  return s;
}

}  // namespace

TEST_CASE("active probability", "[pilots]") {
  CHECK_THAT(active_probability(DiscreteExp(0.25), 0.02, 0.4), WithinRel(0.05 * (1.0 - std::exp(-0.25)), 1e-14));
  CHECK(active_probability(DiscreteExp(1e-12), 0.02, 0.4) < 1e-13);
  CHECK_THROWS_AS(active_probability(DiscreteExp(0.25), 0.5, 0.4), DomainError);

  // Renewal simulation: DiscreteExp inter-arrivals in blocks, one uniform slot per message.
  const DiscreteExp traffic(0.25);
  const long slots_per_block = 20;
  Rng rng = make_stream(61, 0);
  std::uniform_int_distribution<long> slot(0, slots_per_block - 1);
  const long blocks = 2000000;
  long occupied = 0;
  for (long b = traffic.sample(rng); b < blocks; b += traffic.sample(rng)) {
    if (slot(rng) == 0) ++occupied;
  }
  const double q = active_probability(traffic, 0.02, 0.4);
  const double sd = std::sqrt(q * (1.0 - q) / blocks);
  CHECK(std::abs(static_cast<double>(occupied) / blocks - q) < 3.0 * sd);
}

TEST_CASE("collision probability", "[pilots]") {
  const DiscreteExp traffic(0.25);
  SECTION("matches a direct transcription") {
    for (long s : {2L, 10L, 100L, 500L}) {
      for (long l = 1; l <= s; l += std::max(1L, s / 17)) {
        INFO("S=" << s << " L=" << l);
        CHECK_THAT(collision_probability(s, l, traffic, kSlot, kBlock), WithinRel(collision_formula(s, l, 0.25), 1e-8));
      }
    }
  }
  SECTION("single device never collides") { CHECK(collision_probability(1, 1, traffic, kSlot, kBlock) == 0.0); }
  SECTION("nonincreasing in L") {
    for (long s : {10L, 100L, 500L}) {
      double prev = 1.0;
      for (long l = 1; l <= s; ++l) {
        const double c = collision_probability(s, l, traffic, kSlot, kBlock);
        REQUIRE(c <= prev + 1e-15);
        REQUIRE(c >= 0.0);
        prev = c;
      }
    }
  }
  SECTION("argument checks") {
    CHECK_THROWS_AS(collision_probability(10, 0, traffic, kSlot, kBlock), DomainError);
    CHECK_THROWS_AS(collision_probability(10, 11, traffic, kSlot, kBlock), DomainError);
  }
  SECTION("pilot-level simulation") {
    const long s = 100;
    const long l = 10;
    const double q = active_probability(traffic, kSlot, kBlock);
    Rng rng = make_stream(62, 0);
    std::binomial_distribution<long> active(s, q);
    std::uniform_int_distribution<long> pick(0, l - 1);
    std::vector<int> users(static_cast<std::size_t>(l));
    long used = 0;
    long collided = 0;
    for (long slot = 0; slot < 200000; ++slot) {
      std::fill(users.begin(), users.end(), 0);
      const long n = active(rng);
      for (long k = 0; k < n; ++k) ++users[static_cast<std::size_t>(pick(rng))];
      for (int c : users) {
        used += c >= 1;
        collided += c >= 2;
      }
    }
    const double p = collision_probability(s, l, traffic, kSlot, kBlock);
    CHECK(std::abs(static_cast<double>(collided) / used - p) <= 2.0 * oracle::binomial_half_width(p, used));
  }
}

TEST_CASE("pilot fixed-point map", "[pilots][properties]") {
  SECTION("contraction at eps = 0") {
    for (long s : {2L, 10L, 100L, 500L}) {
      for (int k = 1; k < 200; ++k) {
        const double u = k / 200.0;
        INFO("S=" << s << " u=" << u);
        REQUIRE(pilot_fixed_point_slope(u, s, 0.0) < 1.0);
      }
    }
  }
  SECTION("slope matches central differences") {
    for (long s : {3L, 10L, 100L}) {
      for (double eps : {0.0, 0.1, 0.5}) {
        for (double u : {0.2, 0.5, 0.8, 0.95}) {
          const double h = 1e-6;
          const double fd =
              std::abs(pilot_fixed_point_map(u + h, s, eps) - pilot_fixed_point_map(u - h, s, eps)) / (2.0 * h);
          CHECK_THAT(pilot_fixed_point_slope(u, s, eps), WithinAbs(fd, 1e-6));
        }
      }
    }
  }
  SECTION("argument checks") {
    CHECK_THROWS_AS(pilot_fixed_point_map(0.0, 10, 0.1), DomainError);
    CHECK_THROWS_AS(pilot_fixed_point_map(0.5, 1, 0.1), DomainError);
    CHECK_THROWS_AS(pilot_fixed_point_map(0.5, 10, 1.0), DomainError);
  }
}

TEST_CASE("optimal pilot count", "[pilots]") {
  const DiscreteExp traffic(0.25);
  SECTION("reference deployment") {
    const PilotPlan plan = optimal_pilot_count(100, 0.1, traffic, kSlot, kBlock);
    CHECK(plan.num_sequences == 6);
    CHECK(plan.target_collision == 0.1);
    CHECK_THAT(plan.reuse_factor, WithinRel(0.06, 1e-14));
    CHECK(plan.collision <= 0.1);
    CHECK(collision_probability(100, 5, traffic, kSlot, kBlock) > 0.1);
    CHECK(plan.iterations_used <= 16);
  }
  SECTION("feasible, minimal and fast across a grid") {
    for (long s : {2L, 10L, 37L, 100L, 500L}) {
      for (double eps : {1e-3, 0.01, 0.05, 0.1, 0.3, 0.7}) {
        for (double lambda : {0.05, 0.25, 0.9}) {
          for (double tol : {1e-2, 1e-5}) {
            const DiscreteExp t(lambda);
            const PilotPlan plan = optimal_pilot_count(s, eps, t, kSlot, kBlock, tol);
            INFO("S=" << s << " eps=" << eps << " lambda=" << lambda << " tol=" << tol);
            REQUIRE(plan.num_sequences >= 1);
            REQUIRE(plan.num_sequences <= s);
            if (plan.num_sequences < s) {
              REQUIRE(collision_probability(s, plan.num_sequences, t, kSlot, kBlock) <= eps);
              REQUIRE(plan.collision == collision_probability(s, plan.num_sequences, t, kSlot, kBlock));
            } else {
              REQUIRE(plan.collision == 0.0);
            }
            REQUIRE(plan.num_sequences == linear_search_pilots(s, eps, t));
            REQUIRE(plan.iterations_used <= 16);
          }
        }
      }
    }
  }
  SECTION("very strict target assigns one pilot per device") {
    const PilotPlan plan = optimal_pilot_count(10, 1e-9, traffic, kSlot, kBlock);
    CHECK(plan.num_sequences == 10);
    CHECK(plan.collision == 0.0);
    CHECK(plan.reuse_factor == 1.0);
  }
  SECTION("single device") {
    const PilotPlan plan = optimal_pilot_count(1, 0.1, traffic, kSlot, kBlock);
    CHECK(plan.num_sequences == 1);
    CHECK(plan.collision == 0.0);
  }
  SECTION("argument checks") {
    CHECK_THROWS_AS(optimal_pilot_count(10, 0.0, traffic, kSlot, kBlock), DomainError);
    CHECK_THROWS_AS(optimal_pilot_count(10, 1.0, traffic, kSlot, kBlock), DomainError);
    CHECK_THROWS_AS(optimal_pilot_count(10, 0.1, traffic, kSlot, kBlock, 0.0), DomainError);
    CHECK_THROWS_AS(optimal_pilot_count(0, 0.1, traffic, kSlot, kBlock), DomainError);
  }
}

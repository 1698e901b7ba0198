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

#ifndef WPCN_NUMERICS_HPP
#define WPCN_NUMERICS_HPP

#include <cstdint>
#include <random>

namespace wpcn {

/// Pseudo-random engine used by every stochastic routine in the library.
using Rng = std::mt19937_64;

/// Derives an independent generator for substream `stream` of a run seeded by `seed`.
///
/// The engine seed is splitmix64(splitmix64(seed) + (stream + 1) * 0x9E3779B97F4A7C15).
/// Sweep point k uses stream k; Monte Carlo workers that need finer granularity
/// use stream (k << 32) | worker. The scheme is stable across releases so that
/// tables produced with the same seed stay bit-identical.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

std::uint64_t splitmix64(std::uint64_t x);

/// Generalized Marcum Q-function Q_m(a, b) for real order m > 0.
///
/// Evaluated as a Poisson(a^2/2) mixture of regularized upper incomplete gamma
/// functions Q(m + k, b^2/2), summed outward from the Poisson mode until the
/// neglected Poisson mass is below 1e-13. Summing from the mode keeps the
/// weights representable for large noncentralities where exp(-a^2/2) underflows.
double marcum_q(double order, double a, double b);

/// Noncentral chi-squared law with `dof` degrees of freedom and noncentrality `noncentrality`.
class NoncentralChi2 {
 public:
  NoncentralChi2(double dof, double noncentrality);

  double dof() const { return dof_; }
  double noncentrality() const { return noncentrality_; }
  double mean() const { return dof_ + noncentrality_; }
  double variance() const { return 2.0 * (dof_ + 2.0 * noncentrality_); }

  /// F(y) = 1 - Q_{dof/2}(sqrt(noncentrality), sqrt(y)), summed on the lower tail directly.
  double cdf(double y) const;

  /// Upper tail 1 - F(y).
  double ccdf(double y) const;

  /// Exact draw: squared shifted normal plus a central gamma part. Orders below
  /// one fall back to the Poisson mixture representation.
  double sample(Rng& rng) const;

 private:
  double dof_;
  double noncentrality_;
};

/// Convenience free functions mirroring the class interface.
double nc_chi2_cdf(const NoncentralChi2& dist, double y);
double nc_chi2_sample(const NoncentralChi2& dist, Rng& rng);

/// Inter-arrival law of slotted Poisson traffic, counted in coherence intervals:
/// P[V = v] = (e^rate - 1) e^{-rate v}, v >= 1.
///
/// The type only requires rate > 0. Traffic models additionally require rate < 1,
/// which ScenarioConfig enforces.
class DiscreteExp {
 public:
  explicit DiscreteExp(double rate);

  double rate() const { return rate_; }

  double pmf(long v) const;
  /// P[V <= v].
  double cdf(long v) const;
  /// P[V > v] = e^{-rate v}.
  double tail(long v) const;
  double mean() const;

  /// Smallest v with cdf(v) >= u, for u in [0, 1).
  long quantile(double u) const;
  long sample(Rng& rng) const;

  /// ceil(10 * E[V]), the truncation point recommended for series over V.
  long default_vmax() const;

 private:
  double rate_;
};

double discrete_exp_pmf(const DiscreteExp& dist, long v);
double discrete_exp_mean(const DiscreteExp& dist);
long discrete_exp_sample(const DiscreteExp& dist, Rng& rng);

/// Converts a dBm figure to watts.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace wpcn

#endif  // WPCN_NUMERICS_HPP

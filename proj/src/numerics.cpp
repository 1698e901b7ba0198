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

#include "wpcn/numerics.hpp"

#include "wpcn/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpcn {

namespace {

// Absolute bound on the Poisson mass left out of the mixture series.
constexpr double kMixtureTailBound = 1e-13;

// Huge shapes with small x underflow inside Boost's prefix; the regularized
// value is still well defined (0 or 1), so range errors must not throw.
using GammaPolicy = boost::math::policies::policy<boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
                                                  boost::math::policies::underflow_error<boost::math::policies::ignore_error>>;

double gamma_term(double shape, double x, bool upper) {
  return upper ? boost::math::gamma_q(shape, x, GammaPolicy()) : boost::math::gamma_p(shape, x, GammaPolicy());
}

// sum_k Poisson(k; lam) * G(shape + k, x) with G the regularized upper (or lower)
// incomplete gamma function. Both G <= 1, so the neglected Poisson mass bounds
// the truncation error.
double poisson_gamma_mixture(double shape, double lam, double x, bool upper) {
  if (x <= 0.0) return upper ? 1.0 : 0.0;
  if (std::isinf(x)) return upper ? 0.0 : 1.0;
  if (lam == 0.0) return gamma_term(shape, x, upper);

  const double k0 = std::floor(lam);
  const double w0 = std::exp(-lam + k0 * std::log(lam) - std::lgamma(k0 + 1.0));
  double sum = w0 * gamma_term(shape + k0, x, upper);

  // Upward from the mode. For k >= floor(lam) the weight ratios lam/(k+j) < 1
  // shrink geometrically, giving the bound below.
  double w = w0;
  for (double k = k0;; k += 1.0) {
    const double bound = w * (lam / (k + 1.0)) / (1.0 - lam / (k + 2.0));
    if (bound < 0.5 * kMixtureTailBound) break;
    w *= lam / (k + 1.0);
    sum += w * gamma_term(shape + k + 1.0, x, upper);
  }

  // Downward from the mode.
  w = w0;
  for (double k = k0; k > 0.0; k -= 1.0) {
    const double ratio = k / lam;
    const double bound = w * ratio / (1.0 - (k - 1.0) / lam);
    if (bound < 0.5 * kMixtureTailBound) break;
    w *= ratio;
    sum += w * gamma_term(shape + k - 1.0, x, upper);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double uniform_open_one(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  // libstdc++ can round generate_canonical up to exactly 1.
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  return u;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) + (stream + 1) * 0x9E3779B97F4A7C15ULL));
}

double marcum_q(double order, double a, double b) {
  detail::require_positive(order, "Marcum-Q order");
  detail::require_nonnegative(a, "Marcum-Q argument a");
  detail::require_nonnegative(b, "Marcum-Q argument b");
  return poisson_gamma_mixture(order, 0.5 * a * a, 0.5 * b * b, /*upper=*/true);
}

NoncentralChi2::NoncentralChi2(double dof, double noncentrality)
    : dof_(dof), noncentrality_(noncentrality) {
  detail::require_positive(dof, "noncentral chi-squared dof");
  detail::require_nonnegative(noncentrality, "noncentral chi-squared noncentrality");
}

double NoncentralChi2::cdf(double y) const {
  if (std::isnan(y) || y < 0.0) throw DomainError("noncentral chi-squared CDF needs y >= 0");
  return poisson_gamma_mixture(0.5 * dof_, 0.5 * noncentrality_, 0.5 * y, /*upper=*/false);
}

double NoncentralChi2::ccdf(double y) const {
  if (std::isnan(y) || y < 0.0) throw DomainError("noncentral chi-squared CCDF needs y >= 0");
  return poisson_gamma_mixture(0.5 * dof_, 0.5 * noncentrality_, 0.5 * y, /*upper=*/true);
}

double NoncentralChi2::sample(Rng& rng) const {
  if (dof_ >= 1.0) {
    std::normal_distribution<double> normal(std::sqrt(noncentrality_), 1.0);
    const double z = normal(rng);
    double x = z * z;
    if (dof_ > 1.0) {
      std::gamma_distribution<double> central(0.5 * (dof_ - 1.0), 2.0);
      x += central(rng);
    }
    return x;
  }
  // dof < 1: chi2(dof + 2J) with J ~ Poisson(noncentrality / 2).
  long j = 0;
  if (noncentrality_ > 0.0) {
    std::poisson_distribution<long> poisson(0.5 * noncentrality_);
    j = poisson(rng);
  }
  std::gamma_distribution<double> g(0.5 * dof_ + static_cast<double>(j), 2.0);
  return g(rng);
}

double nc_chi2_cdf(const NoncentralChi2& dist, double y) { return dist.cdf(y); }
double nc_chi2_sample(const NoncentralChi2& dist, Rng& rng) { return dist.sample(rng); }

DiscreteExp::DiscreteExp(double rate) : rate_(rate) {
  detail::require_positive(rate, "inter-arrival rate");
}

double DiscreteExp::pmf(long v) const {
  if (v < 1) throw DomainError("inter-arrival PMF is defined for v >= 1");
  return std::expm1(rate_) * std::exp(-rate_ * static_cast<double>(v));
}

double DiscreteExp::cdf(long v) const {
  if (v < 1) return 0.0;
  return -std::expm1(-rate_ * static_cast<double>(v));
}

double DiscreteExp::tail(long v) const {
  if (v < 1) return 1.0;
  return std::exp(-rate_ * static_cast<double>(v));
}

double DiscreteExp::mean() const { return -1.0 / std::expm1(-rate_); }

long DiscreteExp::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("quantile level must lie in [0, 1)");
  double raw = std::ceil(-std::log1p(-u) / rate_);
  if (raw > static_cast<double>(std::numeric_limits<long>::max() / 2)) {
    raw = static_cast<double>(std::numeric_limits<long>::max() / 2);
  }
  long v = std::max(1L, static_cast<long>(raw));
  // Round-off guard on both sides of the step.
  while (v > 1 && cdf(v - 1) >= u) --v;
  while (cdf(v) < u) ++v;
  return v;
}

long DiscreteExp::sample(Rng& rng) const { return quantile(uniform_open_one(rng)); }

long DiscreteExp::default_vmax() const { return static_cast<long>(std::ceil(10.0 * mean())); }

double discrete_exp_pmf(const DiscreteExp& dist, long v) { return dist.pmf(v); }
double discrete_exp_mean(const DiscreteExp& dist) { return dist.mean(); }
long discrete_exp_sample(const DiscreteExp& dist, Rng& rng) { return dist.sample(rng); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

}  // namespace wpcn

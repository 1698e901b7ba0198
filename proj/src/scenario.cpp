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

#include "wpcn/scenario.hpp"

#include "wpcn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wpcn {

SystemParams SystemParams::defaults() {
  SystemParams p;
  p.noise_power = dbm_to_watts(-94.0);
  p.dl_pilot_unit_energy = dbm_to_watts(-20.0);
  p.ul_pilot_unit_energy = dbm_to_watts(-30.0);
  return p;
}

double SystemParams::sinr_threshold() const { return std::exp2(spectral_msg / slot_time) - 1.0; }

void SystemParams::validate() const {
  detail::require_positive(hap_power, "hap_power");
  detail::require_positive(noise_power, "noise_power");
  detail::require(conversion_eff > 0.0 && conversion_eff <= 1.0, "conversion_eff must lie in (0, 1]");
  detail::require_nonnegative(rician_k, "rician_k");
  detail::require_positive(coherence_time, "coherence_time");
  detail::require_positive(slot_time, "slot_time");
  detail::require_positive(tx_power, "tx_power");
  detail::require_positive(circuit_power, "circuit_power");
  detail::require_nonnegative(dl_pilot_unit_energy, "dl_pilot_unit_energy");
  detail::require_nonnegative(ul_pilot_unit_energy, "ul_pilot_unit_energy");
  detail::require_nonnegative(spectral_msg, "spectral_msg");
  detail::require_positive(pilot_symbol_time, "pilot_symbol_time");
  detail::require(antennas_total >= 1, "antennas_total must be at least 1");
  detail::require(antennas_tx >= 0 && antennas_tx <= antennas_total,
                  "antennas_tx must lie in [0, antennas_total]");
  detail::require(slot_time <= coherence_time / antennas_total * (1.0 + 1e-12),
                  "slot_time must not exceed coherence_time / antennas_total");
}

long blocks_spanned(double interval, double coherence_time) {
  detail::require_nonnegative(interval, "interval");
  detail::require_positive(coherence_time, "coherence_time");
  const double r = interval / coherence_time;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(r));
}

long slots_in(double interval, double slot_time) {
  detail::require_nonnegative(interval, "interval");
  detail::require_positive(slot_time, "slot_time");
  const double r = interval / slot_time;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
  return static_cast<long>(std::floor(r));
}

Deployment::Deployment(std::vector<double> gains, std::vector<double> distances)
    : gains_(std::move(gains)), distances_(std::move(distances)), worst_(0) {
  detail::require(!gains_.empty(), "a deployment needs at least one device");
  detail::require(distances_.empty() || distances_.size() == gains_.size(),
                  "distances must match gains in length");
  for (double g : gains_) detail::require_positive(g, "channel gain");
  worst_ = static_cast<std::size_t>(std::min_element(gains_.begin(), gains_.end()) - gains_.begin());
}

std::vector<std::size_t> Deployment::order_by_gain() const {
  std::vector<std::size_t> idx(gains_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gains_[a] < gains_[b]; });
  return idx;
}

double path_gain(double distance, double pl_exponent, double fixed_loss_db) {
  detail::require_positive(distance, "distance");
  return std::pow(10.0, -fixed_loss_db / 10.0) * std::pow(distance, -pl_exponent);
}

std::vector<long> ring_counts(long num_devices, std::span<const double> radii) {
  detail::require(!radii.empty(), "at least one ring radius is required");
  for (std::size_t r = 0; r < radii.size(); ++r) {
    detail::require_positive(radii[r], "ring radius");
    detail::require(r == 0 || radii[r] > radii[r - 1], "ring radii must be strictly increasing");
  }
  detail::require(num_devices >= static_cast<long>(radii.size()),
                  "num_devices must be at least the number of rings");

  const double total = std::accumulate(radii.begin(), radii.end(), 0.0);
  std::vector<long> counts(radii.size());
  std::vector<double> remainder(radii.size());
  long assigned = 0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double quota = static_cast<double>(num_devices) * radii[r] / total;
    counts[r] = static_cast<long>(std::floor(quota));
    remainder[r] = quota - static_cast<double>(counts[r]);
    assigned += counts[r];
  }
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (long k = 0; k < num_devices - assigned; ++k) ++counts[order[static_cast<std::size_t>(k)]];
  return counts;
}

Deployment ring_deployment(long num_devices, std::span<const double> radii, double pl_exponent,
                           double fixed_loss_db) {
  const auto counts = ring_counts(num_devices, radii);
  std::vector<double> gains;
  std::vector<double> distances;
  gains.reserve(static_cast<std::size_t>(num_devices));
  distances.reserve(static_cast<std::size_t>(num_devices));
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double g = path_gain(radii[r], pl_exponent, fixed_loss_db);
    for (long k = 0; k < counts[r]; ++k) {
      gains.push_back(g);
      distances.push_back(radii[r]);
    }
  }
  return Deployment(std::move(gains), std::move(distances));
}

CVector sample_rician(long dim, double kappa, Rng& rng) {
  detail::require(dim >= 1, "channel dimension must be at least 1");
  detail::require_nonnegative(kappa, "rician_k");
  const double los = std::sqrt(kappa / (1.0 + kappa));
  const double sd = std::sqrt(0.5 / (1.0 + kappa));
  std::normal_distribution<double> normal(0.0, sd);
  CVector h(dim);
  for (long j = 0; j < dim; ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    h(j) = std::complex<double>(los + re, im);
  }
  return h;
}

ChannelRealization::ChannelRealization(CMatrix matrix) : matrix_(std::move(matrix)) {
  detail::require(matrix_.allFinite(), "channel realization has non-finite entries");
}

ChannelRealization ChannelRealization::draw(long antennas, long devices, double kappa, Rng& rng) {
  detail::require(devices >= 1, "a realization needs at least one device");
  CMatrix m(antennas, devices);
  for (long j = 0; j < devices; ++j) m.col(j) = sample_rician(antennas, kappa, rng);
  return ChannelRealization(std::move(m));
}

}  // namespace wpcn

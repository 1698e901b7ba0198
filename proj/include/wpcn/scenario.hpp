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

#ifndef WPCN_SCENARIO_HPP
#define WPCN_SCENARIO_HPP

#include "wpcn/numerics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace wpcn {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Physical and protocol constants of the network. Energies are in joules,
/// powers in watts, times in seconds.
struct SystemParams {
  double hap_power = 10.0;             ///< HAP transmit power P
  double noise_power = 0.0;            ///< receiver noise power at the HAP
  double conversion_eff = 0.25;        ///< linear energy-harvesting efficiency
  double rician_k = 5.0;               ///< Rician factor
  double coherence_time = 0.4;         ///< T_c
  double slot_time = 0.02;             ///< uplink message duration t
  double tx_power = 200e-6;            ///< device transmit power p
  double circuit_power = 20e-6;        ///< device circuit consumption p_c
  double dl_pilot_unit_energy = 1e-5;  ///< per-antenna downlink CSI cost
  double ul_pilot_unit_energy = 1e-6;  ///< per-sequence uplink pilot cost
  double spectral_msg = 1e-3;          ///< message size, bits/Hz
  int antennas_total = 6;              ///< M
  int antennas_tx = 3;                 ///< M_t for CSI-based powering
  double pilot_symbol_time = 70e-6;    ///< t_p, imperfect uplink CSI model only

  /// Network defaults of the reference deployment (noise -94 dBm).
  static SystemParams defaults();

  int antennas_rx() const { return antennas_total - antennas_tx; }

  /// SINR threshold 2^{k/t} - 1 for decoding a message of `spectral_msg` bits/Hz in `slot_time`.
  double sinr_threshold() const;

  /// Throws DomainError when an invariant is violated.
  void validate() const;

  bool operator==(const SystemParams&) const = default;
};

/// Number of coherence blocks spanned by an interval, ceil(interval / T_c).
/// Ratios within 1e-9 of an integer are snapped so that 1.2 / 0.4 counts three blocks.
long blocks_spanned(double interval, double coherence_time);

/// Number of whole slots in an interval, floor(interval / t), with the same snapping.
long slots_in(double interval, double slot_time);

/// Average channel gains of a device population and its worst-served member.
class Deployment {
 public:
  explicit Deployment(std::vector<double> gains, std::vector<double> distances = {});

  std::span<const double> gains() const { return gains_; }
  std::span<const double> distances() const { return distances_; }
  std::size_t size() const { return gains_.size(); }
  double gain(std::size_t i) const { return gains_.at(i); }

  /// argmin of the gains; the first index on ties.
  std::size_t worst_index() const { return worst_; }
  double worst_gain() const { return gains_[worst_]; }

  /// Device indices ordered by increasing gain (worst first), stable on ties.
  std::vector<std::size_t> order_by_gain() const;

 private:
  std::vector<double> gains_;
  std::vector<double> distances_;
  std::size_t worst_;
};

/// Log-distance average gain 10^{-fixed_loss_db/10} d^{-pl_exponent}.
double path_gain(double distance, double pl_exponent, double fixed_loss_db);

/// Splits `num_devices` over concentric rings proportionally to ring radius
/// (largest-remainder rounding). Ties in the remainders go to the inner ring.
std::vector<long> ring_counts(long num_devices, std::span<const double> radii);

/// Devices on concentric rings around the HAP, listed ring by ring from the
/// innermost outward.
Deployment ring_deployment(long num_devices, std::span<const double> radii, double pl_exponent,
                           double fixed_loss_db);

/// One draw of h ~ CN(sqrt(k/(1+k)) 1, I/(1+k)).
CVector sample_rician(long dim, double kappa, Rng& rng);

/// Fading coefficients of one coherence block; one column per device.
class ChannelRealization {
 public:
  explicit ChannelRealization(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  long antennas() const { return matrix_.rows(); }
  long devices() const { return matrix_.cols(); }
  CVector column(long j) const { return matrix_.col(j); }

  /// Independent Rician columns.
  static ChannelRealization draw(long antennas, long devices, double kappa, Rng& rng);

 private:
  CMatrix matrix_;
};

}  // namespace wpcn

#endif  // WPCN_SCENARIO_HPP

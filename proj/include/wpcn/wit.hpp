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

#ifndef WPCN_WIT_HPP
#define WPCN_WIT_HPP

#include "wpcn/numerics.hpp"
#include "wpcn/scenario.hpp"
#include "wpcn/wet.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace wpcn {

enum class Equalizer { Zf, Mmse };

std::string_view to_string(Equalizer eq);
Equalizer parse_equalizer(std::string_view text);

/// One uplink decoding problem y = H P^{1/2} x + w restricted to the active devices.
struct UplinkInstance {
  ChannelRealization channel;  ///< M_r x N
  std::vector<double> weights; ///< p_i beta_i per active device, watts
  double noise_power;          ///< sigma^2 (plus residual self-interference, if any)
  std::size_t target_index;    ///< column of the device under evaluation

  UplinkInstance(ChannelRealization channel, std::vector<double> weights, double noise_power,
                 std::size_t target_index = 0);

  long streams() const { return channel.devices(); }
  long receive_antennas() const { return channel.antennas(); }
};

/// Condition number above which the ZF Gram matrix counts as singular.
inline constexpr double kZfConditionLimit = 1e12;

/// Zero-forcing filter Q = (A^H A)^{-1} A^H with A = H P^{1/2}, so Q A = I.
/// Empty when N > M_r or the Gram matrix is numerically singular.
std::optional<CMatrix> zf_equalizer(const CMatrix& channel, const std::vector<double>& weights);

/// Linear MMSE filter, one row per stream: q_i^H = a_i^H (sigma^2 I + A A^H)^{-1}.
CMatrix mmse_equalizer(const CMatrix& channel, const std::vector<double>& weights, double noise_power);

/// Per-stream ZF SINRs 1/(sigma^2 [(A^H A)^{-1}]_ii); all zero when ZF is infeasible.
std::vector<double> zf_sinrs(const UplinkInstance& inst);

/// Per-stream MMSE SINRs c_i h_i^H (sigma^2 I + sum_{j != i} c_j h_j h_j^H)^{-1} h_i.
std::vector<double> mmse_sinrs(const UplinkInstance& inst);

std::vector<double> sinrs(const UplinkInstance& inst, Equalizer eq);

/// SINR of the target stream only.
double target_sinr(const UplinkInstance& inst, Equalizer eq);

/// SINRs delivered by a fixed filter `q` (one row per stream) on the true channel.
/// Used when the filter was designed from an imperfect channel estimate.
std::vector<double> realized_sinrs(const CMatrix& q, const CMatrix& channel, const std::vector<double>& weights,
                                   double noise_power);

/// Uplink channel split h = estimate + error after pilot training with energy `csi_ul`.
struct ChannelEstimate {
  CVector estimate;
  CVector error;
};

/// Fraction of the scattered channel power captured by the estimate,
/// (xi/t_p) / ((xi/t_p) + sigma^2).
double estimation_quality(const SystemParams& params, double csi_ul);

/// LMMSE-style split of a Rician channel: the estimate keeps the LOS mean and has
/// per-entry variance rho/(1+k); the error is uncorrelated with it and has
/// variance (1-rho)/(1+k).
ChannelEstimate impaired_uplink_channel(const SystemParams& params, const CVector& true_channel, double csi_ul,
                                        Rng& rng);

/// Imperfect cancellation of the HAP's own powering signal.
struct SelfInterference {
  double attenuation_db = std::numeric_limits<double>::infinity();  ///< inf = perfect SIC
  double nearfield_gain_db = 0.0;

  bool operator==(const SelfInterference&) const = default;
};

/// Residual self-interference power added to sigma^2:
/// 10^{-att/10} 10^{g/10} P m, with m = M_t for CSI-based powering and 1 for SA.
double residual_self_interference(const SystemParams& params, WetScheme scheme, const SelfInterference& si);

/// Receive antennas left for decoding: M - M_t for CSI-based powering, M - 1 for SA.
int receive_antennas(const SystemParams& params, WetScheme scheme);

struct UplinkOptions {
  Equalizer equalizer = Equalizer::Mmse;
  WetScheme wet_scheme = WetScheme::CsiMrt;
  SelfInterference self_interference{};
  /// Build equalizers from channel estimates obtained with `csi_ul` pilot energy.
  bool imperfect_csi = false;
  double csi_ul = 0.0;
};

/// Monte Carlo estimate with a normal-approximation 95% confidence half-width.
struct OutageEstimate {
  double value = 0.0;
  double ci_half_width = 0.0;
  long trials = 0;
  long events = 0;
};

/// Uplink pilot energy under periodic traffic, ceil(S / floor(t_s/t)) unit.
double pilot_cost_periodic(long num_devices, double period, double slot_time, double unit);

/// Concurrent uplink streams under periodic traffic, ceil(S / floor(t_s/t)).
long concurrent_streams(long num_devices, double period, double slot_time);

/// Information outage of the worst device under periodic traffic. It shares its
/// slot with the N - 1 next-weakest devices; channels are redrawn every trial.
OutageEstimate info_outage_periodic(const SystemParams& params, const Deployment& deployment, double period,
                                    long trials, Rng& rng, const UplinkOptions& options = {});

// ---- random access ------------------------------------------------------

/// Pilot allocation for Poisson traffic.
struct PilotPlan {
  long num_sequences = 1;        ///< L*
  double target_collision = 0.0; ///< epsilon
  double reuse_factor = 0.0;     ///< L*/S
  long iterations_used = 0;      ///< fixed-point iterations
  long initial_guess = 0;        ///< L_0 from the fixed point, before the feasibility refinement
  double collision = 0.0;        ///< collision probability at L* (0 when L* = S)
};

/// Probability that a device transmits in a given slot, (t/T_c)(1 - e^{-lambda}).
double active_probability(const DiscreteExp& traffic, double slot_time, double coherence_time);

/// Probability that an active device shares its pilot with another active device
/// when S devices pick among L orthogonal pilots.
double collision_probability(long num_devices, long num_pilots, const DiscreteExp& traffic, double slot_time,
                             double coherence_time);

/// g~(u) = ((1-eps)/S)^{1/(S-1)} g(u)^{-1/(S-1)} with g(u) = (1-u)/(1-u^S).
double pilot_fixed_point_map(double u, long num_devices, double eps);

/// |d g~/du|.
double pilot_fixed_point_slope(double u, long num_devices, double eps);

/// Smallest L with collision probability <= eps. The fixed point of g~ gives a
/// first guess L_0 which is then corrected by direct evaluation; L* = S (no
/// collisions) when no smaller L is feasible.
PilotPlan optimal_pilot_count(long num_devices, double eps, const DiscreteExp& traffic, double slot_time,
                              double coherence_time, double tol = 1e-5);

struct PoissonOutageEstimate {
  OutageEstimate decoding;  ///< outage given no pilot collision
  double collision = 0.0;   ///< collision term used in the composition
  double value = 0.0;       ///< collision + (1 - collision) decoding
  double ci_half_width = 0.0;
};

/// Information outage of the worst device under Poisson traffic. The number of
/// active devices is Binomial(S, q) conditioned on at least one; interferers are
/// drawn uniformly without replacement from the other devices. With
/// `eps_approximation` the collision term is replaced by epsilon (when L* < S).
PoissonOutageEstimate info_outage_poisson(const SystemParams& params, const Deployment& deployment,
                                          const DiscreteExp& traffic, const PilotPlan& plan, long trials, Rng& rng,
                                          const UplinkOptions& options = {}, bool eps_approximation = false);

}  // namespace wpcn

#endif  // WPCN_WIT_HPP

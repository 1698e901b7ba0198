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

#ifndef WPCN_WET_HPP
#define WPCN_WET_HPP

#include "wpcn/numerics.hpp"
#include "wpcn/scenario.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wpcn {

/// Downlink powering strategy.
enum class WetScheme {
  CsiMrt,  ///< CSI-based, evaluated through the MRT bound on the worst device
  CsiSdp,  ///< CSI-based, max-min energy beamforming solved per coherence block
  Sa,      ///< CSI-free switching antenna
};

std::string_view to_string(WetScheme scheme);
WetScheme parse_wet_scheme(std::string_view text);

/// Energy beamformer: W = sum_j w_j w_j^H with Tr(W) = 1.
///
/// Incident power at a device with downlink channel h is P beta sum_j |h^T w_j|^2,
/// which equals P beta Tr(W conj(h) h^T). The Hermitian form conj(h) h^T is what
/// the solver works with.
struct Precoder {
  CMatrix gram;
  std::vector<CVector> beams;
  /// Minimum incident power over the devices the precoder was designed for, in watts.
  /// Empty for precoders built without a device set (e.g. plain MRT).
  std::optional<double> objective;

  /// Beams from the eigendecomposition of `gram`: eigenvectors scaled by the
  /// square roots of their eigenvalues, eigenvalues below 1e-9 Tr(W) dropped.
  static Precoder from_gram(const CMatrix& gram);

  long antennas() const { return gram.rows(); }
};

/// Energy consumed by a device between two uplink messages.
struct EnergyBudget {
  double csi_dl = 0.0;
  double csi_ul = 0.0;
  double circuit = 0.0;
  double tx = 0.0;
  double total = 0.0;
};

/// Downlink CSI acquisition energy per coherence block, M_t xi_0.
double csi_cost_downlink(const SystemParams& params);

/// Budget for periodic traffic with period `period`:
/// ceil(period/T_c) csi_dl + csi_ul + p_c period + p t.
EnergyBudget energy_budget_periodic(const SystemParams& params, WetScheme scheme, double period, double csi_ul);

/// Budget for an inter-arrival of `blocks` coherence intervals under Poisson traffic:
/// v csi_dl + csi_ul + p_c v T_c + p t.
EnergyBudget energy_budget_poisson(const SystemParams& params, WetScheme scheme, long blocks, double csi_ul);

/// P beta sum_j |h^T w_j|^2.
double incident_power(const Precoder& precoder, const CVector& h_dl, double beta, double hap_power);

/// Single-beam maximum ratio transmitter conj(h)/||h||.
Precoder mrt_precoder(const CVector& h_worst);

/// min_i P beta_i Tr(W conj(h_i) h_i^T).
double min_incident_power(const CMatrix& gram, std::span<const CVector> channels_dl, std::span<const double> gains,
                          double hap_power);

/// Thrown by the beamforming solver when it runs out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Precoder best, double gap)
      : std::runtime_error(what), best_(std::move(best)), gap_(gap) {}
  const Precoder& best() const { return best_; }
  /// Duality gap of the best iterate, in watts.
  double gap() const { return gap_; }

 private:
  Precoder best_;
  double gap_;
};

struct BeamformingReport {
  Precoder precoder;
  double upper_bound = 0.0;  ///< dual certificate, watts
  double gap = 0.0;          ///< upper_bound - objective
  long iterations = 0;
};

/// Max-min energy beamforming over the spectrahedron {W >= 0, Tr W = 1}.
///
/// Fully corrective Frank-Wolfe: the linear subproblem is the leading
/// eigenvector of sum_i pi_i P beta_i H_i, and the weights over all collected
/// rank-one atoms are re-optimized exactly each round. The eigenvalue is a dual
/// bound, so the loop stops once (bound - objective) <= tol * objective.
BeamformingReport solve_fair_beamforming_report(std::span<const CVector> channels_dl, std::span<const double> gains,
                                                double hap_power, double tol = 1e-4, long max_iter = 50000);

Precoder solve_fair_beamforming(std::span<const CVector> channels_dl, std::span<const double> gains, double hap_power,
                                double tol = 1e-4, long max_iter = 50000);

/// Likelihood indicator that MRT towards the worst device is the max-min optimum.
double omega_metric(const Deployment& deployment, double kappa, int m_t);

/// Fitted mean normalized incident power at a device that MRT does not target,
/// (1/4) (k / (1 + k/sqrt 2))^2 M_t + 1/(1 + k/2).
double mrt_crossgain(double kappa, int m_t);

/// Incident RF power at a device of gain `beta` under switching-antenna powering,
/// drawn from P beta / (2M(1+k)) chi2(2M, 2Mk).
double sa_incident_sample(const SystemParams& params, double beta, Rng& rng);

/// Incident RF power at the targeted device under MRT, P beta ||h||^2 with h in C^{M_t}.
double mrt_incident_sample(const SystemParams& params, double beta, Rng& rng);

/// Energy outage of the worst device under periodic traffic.
///
/// For CsiMrt the value is the MRT lower bound on the worst-case outage; for Sa
/// it is exact (P <- P/M, M_t <- M, no downlink CSI cost).
double energy_outage_periodic(const SystemParams& params, double beta_worst, double period, double csi_ul,
                              WetScheme scheme);

struct PoissonEnergyOptions {
  long v_max = 0;                     ///< 0 selects DiscreteExp::default_vmax()
  bool allow_short_truncation = false;
};

/// Energy outage of the worst device under Poisson traffic, truncated at v_max.
///
/// Computed as sum_{v<=v_max} P[V=v] F_v + P[V > v_max], which equals
/// 1 - sum_{v<=v_max} P[V=v] Q_v. The truncation error is at most P[V > v_max].
double energy_outage_poisson(const SystemParams& params, double beta_worst, const DiscreteExp& traffic, double csi_ul,
                             WetScheme scheme, PoissonEnergyOptions options = {});

/// Upper bound on |truncated - exact| for energy_outage_poisson, e^{-rate v_max}.
double poisson_truncation_bound(const DiscreteExp& traffic, long v_max);

}  // namespace wpcn

#endif  // WPCN_WET_HPP

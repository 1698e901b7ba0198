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

#include "wpcn/wet.hpp"

#include "wpcn/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wpcn {

namespace {

// Effective parameters of the harvested-energy law at the worst device.
// Switching antenna behaves as MRT with P <- P/M, M_t <- M and free downlink CSI.
struct HarvestLaw {
  double power;
  int antennas;
  double csi_dl_per_block;
};

HarvestLaw harvest_law(const SystemParams& params, WetScheme scheme) {
  switch (scheme) {
    case WetScheme::Sa:
      return {params.hap_power / params.antennas_total, params.antennas_total, 0.0};
    case WetScheme::CsiMrt:
      return {params.hap_power, params.antennas_tx, csi_cost_downlink(params)};
    case WetScheme::CsiSdp:
      break;
  }
  throw DomainError("analytic energy outage is available for csi_mrt and sa only");
}

double csi_dl_per_block(const SystemParams& params, WetScheme scheme) {
  return scheme == WetScheme::Sa ? 0.0 : csi_cost_downlink(params);
}

// P[(eta T_c P beta / (2(1+k))) chi2(2 m n, 2 m k n) < budget].
double harvest_shortfall(const SystemParams& params, const HarvestLaw& law, double beta, long blocks, double budget) {
  const double m = static_cast<double>(law.antennas) * static_cast<double>(blocks);
  const double k = params.rician_k;
  const NoncentralChi2 dist(2.0 * m, 2.0 * m * k);
  const double y = 2.0 * budget * (k + 1.0) / (params.conversion_eff * params.coherence_time * law.power * beta);
  return dist.cdf(y);
}

}  // namespace

std::string_view to_string(WetScheme scheme) {
  switch (scheme) {
    case WetScheme::CsiMrt:
      return "csi_mrt";
    case WetScheme::CsiSdp:
      return "csi_sdp";
    case WetScheme::Sa:
      return "sa";
  }
  return "unknown";
}

WetScheme parse_wet_scheme(std::string_view text) {
  if (text == "csi_mrt") return WetScheme::CsiMrt;
  if (text == "csi_sdp") return WetScheme::CsiSdp;
  if (text == "sa") return WetScheme::Sa;
  throw DomainError("unknown WET scheme '" + std::string(text) + "' (expected csi_mrt, csi_sdp or sa)");
}

Precoder Precoder::from_gram(const CMatrix& gram) {
  detail::require(gram.rows() == gram.cols() && gram.rows() >= 1, "precoder Gram matrix must be square");
  Precoder p;
  p.gram = 0.5 * (gram + gram.adjoint());
  const double trace = p.gram.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(p.gram);
  const auto& values = eig.eigenvalues();
  for (long j = values.size() - 1; j >= 0; --j) {
    if (values(j) < 1e-9 * trace) continue;
    p.beams.emplace_back(eig.eigenvectors().col(j) * std::sqrt(values(j)));
  }
  return p;
}

double csi_cost_downlink(const SystemParams& params) {
  detail::require(params.antennas_tx >= 1, "downlink CSI cost needs at least one transmit antenna");
  return params.antennas_tx * params.dl_pilot_unit_energy;
}

EnergyBudget energy_budget_periodic(const SystemParams& params, WetScheme scheme, double period, double csi_ul) {
  detail::require(period >= params.slot_time, "period must be at least one slot");
  detail::require_nonnegative(csi_ul, "csi_ul");
  EnergyBudget b;
  b.csi_dl = static_cast<double>(blocks_spanned(period, params.coherence_time)) * csi_dl_per_block(params, scheme);
  b.csi_ul = csi_ul;
  b.circuit = params.circuit_power * period;
  b.tx = params.tx_power * params.slot_time;
  b.total = b.csi_dl + b.csi_ul + b.circuit + b.tx;
  return b;
}

EnergyBudget energy_budget_poisson(const SystemParams& params, WetScheme scheme, long blocks, double csi_ul) {
  detail::require(blocks >= 1, "inter-arrival must span at least one block");
  detail::require_nonnegative(csi_ul, "csi_ul");
  const double v = static_cast<double>(blocks);
  EnergyBudget b;
  b.csi_dl = v * csi_dl_per_block(params, scheme);
  b.csi_ul = csi_ul;
  b.circuit = params.circuit_power * v * params.coherence_time;
  b.tx = params.tx_power * params.slot_time;
  b.total = b.csi_dl + b.csi_ul + b.circuit + b.tx;
  return b;
}

double incident_power(const Precoder& precoder, const CVector& h_dl, double beta, double hap_power) {
  detail::require(h_dl.size() == precoder.antennas(), "channel and precoder dimensions differ");
  double sum = 0.0;
  for (const auto& w : precoder.beams) {
    detail::require(w.size() == h_dl.size(), "channel and beam dimensions differ");
    sum += std::norm((h_dl.array() * w.array()).sum());
  }
  return hap_power * beta * sum;
}

Precoder mrt_precoder(const CVector& h_worst) {
  const double norm = h_worst.norm();
  detail::require(norm > 0.0 && std::isfinite(norm), "MRT needs a nonzero finite channel");
  Precoder p;
  CVector beam = h_worst.conjugate() / norm;
  p.gram = beam * beam.adjoint();
  p.beams.push_back(std::move(beam));
  return p;
}

double min_incident_power(const CMatrix& gram, std::span<const CVector> channels_dl, std::span<const double> gains,
                          double hap_power) {
  detail::require(!channels_dl.empty() && channels_dl.size() == gains.size(), "channels and gains must pair up");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < channels_dl.size(); ++i) {
    detail::require(channels_dl[i].size() == gram.rows(), "channel and precoder dimensions differ");
    const CVector g = channels_dl[i].conjugate();
    const double a = (g.adjoint() * gram * g)(0, 0).real();
    best = std::min(best, hap_power * gains[i] * a);
  }
  return best;
}

double omega_metric(const Deployment& deployment, double kappa, int m_t) {
  detail::require(deployment.size() >= 2, "omega metric needs at least two devices");
  detail::require_nonnegative(kappa, "rician_k");
  detail::require(m_t >= 1, "omega metric needs at least one transmit antenna");
  double inf_other = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < deployment.size(); ++i) {
    if (i != deployment.worst_index()) inf_other = std::min(inf_other, deployment.gain(i));
  }
  const double los = kappa / (1.0 + kappa / std::sqrt(2.0));
  const double coeff = 0.25 * los * los + 1.0 / (m_t * (1.0 + kappa / 2.0));
  return coeff * inf_other / deployment.worst_gain();
}

double mrt_crossgain(double kappa, int m_t) {
  detail::require_nonnegative(kappa, "rician_k");
  detail::require(m_t >= 1, "crossgain needs at least one transmit antenna");
  const double los = kappa / (1.0 + kappa / std::sqrt(2.0));
  return 0.25 * los * los * m_t + 1.0 / (1.0 + kappa / 2.0);
}

double sa_incident_sample(const SystemParams& params, double beta, Rng& rng) {
  detail::require(params.antennas_total >= 1, "switching antenna needs at least one antenna");
  const double m = params.antennas_total;
  const double k = params.rician_k;
  const NoncentralChi2 dist(2.0 * m, 2.0 * m * k);
  return params.hap_power * beta / (2.0 * m * (1.0 + k)) * dist.sample(rng);
}

double mrt_incident_sample(const SystemParams& params, double beta, Rng& rng) {
  detail::require(params.antennas_tx >= 1, "MRT needs at least one transmit antenna");
  return params.hap_power * beta * sample_rician(params.antennas_tx, params.rician_k, rng).squaredNorm();
}

double energy_outage_periodic(const SystemParams& params, double beta_worst, double period, double csi_ul,
                              WetScheme scheme) {
  detail::require_positive(beta_worst, "beta_worst");
  const HarvestLaw law = harvest_law(params, scheme);
  detail::require(law.antennas >= 1, "powering needs at least one transmit antenna");
  const EnergyBudget budget = energy_budget_periodic(params, scheme, period, csi_ul);
  const long blocks = blocks_spanned(period, params.coherence_time);
  return harvest_shortfall(params, law, beta_worst, blocks, budget.total);
}

double energy_outage_poisson(const SystemParams& params, double beta_worst, const DiscreteExp& traffic, double csi_ul,
                             WetScheme scheme, PoissonEnergyOptions options) {
  detail::require_positive(beta_worst, "beta_worst");
  const HarvestLaw law = harvest_law(params, scheme);
  detail::require(law.antennas >= 1, "powering needs at least one transmit antenna");
  const long prescribed = traffic.default_vmax();
  const long v_max = options.v_max == 0 ? prescribed : options.v_max;
  detail::require(v_max >= 1, "v_max must be positive");
  if (v_max < prescribed && !options.allow_short_truncation) {
    throw DomainError("v_max = " + std::to_string(v_max) + " is below the prescribed ceil(10 E[V]) = " +
                      std::to_string(prescribed) + "; set allow_short_truncation to override");
  }
  double outage = traffic.tail(v_max);
  for (long v = 1; v <= v_max; ++v) {
    const double budget = energy_budget_poisson(params, scheme, v, csi_ul).total;
    outage += traffic.pmf(v) * harvest_shortfall(params, law, beta_worst, v, budget);
  }
  return std::clamp(outage, 0.0, 1.0);
}

double poisson_truncation_bound(const DiscreteExp& traffic, long v_max) { return traffic.tail(v_max); }

}  // namespace wpcn

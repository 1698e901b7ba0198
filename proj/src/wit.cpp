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

#include "wpcn/wit.hpp"

#include "wpcn/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wpcn {

namespace {

constexpr double kZ95 = 1.959963984540054;

// A = H diag(sqrt(c)).
CMatrix weighted(const CMatrix& channel, const std::vector<double>& weights) {
  detail::require(static_cast<long>(weights.size()) == channel.cols(), "one weight per stream is required");
  CMatrix a = channel;
  for (long j = 0; j < a.cols(); ++j) a.col(j) *= std::sqrt(weights[static_cast<std::size_t>(j)]);
  return a;
}

// Inverse of the ZF Gram matrix, or nothing when ZF cannot separate the streams.
std::optional<CMatrix> zf_gram_inverse(const CMatrix& a) {
  const long n = a.cols();
  if (a.rows() == 0 || n > a.rows()) return std::nullopt;
  const CMatrix gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(n - 1);
  if (!(lo > 0.0) || hi / lo >= kZfConditionLimit) return std::nullopt;
  return gram.ldlt().solve(CMatrix::Identity(n, n));
}

double mmse_stream_sinr(const CMatrix& a, long i, double noise_power) {
  const long m = a.rows();
  if (m == 0) return 0.0;
  CMatrix r = noise_power * CMatrix::Identity(m, m);
  for (long j = 0; j < a.cols(); ++j) {
    if (j != i) r.noalias() += a.col(j) * a.col(j).adjoint();
  }
  const CVector x = r.ldlt().solve(a.col(i));
  return std::max(0.0, a.col(i).dot(x).real());
}

double realized_row_sinr(const CMatrix& q, const CMatrix& a, long i, double noise_power) {
  const Eigen::RowVectorXcd r = q.row(i) * a;
  const double signal = std::norm(r(i));
  if (signal == 0.0) return 0.0;
  const double interference = r.squaredNorm() - signal;
  return signal / (std::max(0.0, interference) + noise_power * q.row(i).squaredNorm());
}

OutageEstimate binomial_estimate(long events, long trials) {
  OutageEstimate e;
  e.trials = trials;
  e.events = events;
  e.value = static_cast<double>(events) / static_cast<double>(trials);
  e.ci_half_width = kZ95 * std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  return e;
}

// Target SINR for one draw of the active set; column 0 is the target.
class TargetSinr {
 public:
  TargetSinr(const SystemParams& params, const UplinkOptions& options)
      : params_(params),
        options_(options),
        antennas_(receive_antennas(params, options.wet_scheme)),
        noise_(params.noise_power + residual_self_interference(params, options.wet_scheme, options.self_interference)) {
    if (options_.imperfect_csi) detail::require_nonnegative(options_.csi_ul, "csi_ul");
  }

  int antennas() const { return antennas_; }

  double operator()(const std::vector<double>& weights, Rng& rng) const {
    if (antennas_ <= 0) return 0.0;
    const long n = static_cast<long>(weights.size());
    ChannelRealization h = ChannelRealization::draw(antennas_, n, params_.rician_k, rng);
    if (!options_.imperfect_csi) {
      return target_sinr(UplinkInstance(std::move(h), weights, noise_), options_.equalizer);
    }
    CMatrix est(antennas_, n);
    for (long j = 0; j < n; ++j) est.col(j) = impaired_uplink_channel(params_, h.column(j), options_.csi_ul, rng).estimate;
    CMatrix q;
    if (options_.equalizer == Equalizer::Zf) {
      auto zf = zf_equalizer(est, weights);
      if (!zf) return 0.0;
      q = std::move(*zf);
    } else {
      q = mmse_equalizer(est, weights, noise_);
    }
    return realized_row_sinr(q, weighted(h.matrix(), weights), 0, noise_);
  }

 private:
  const SystemParams& params_;
  const UplinkOptions& options_;
  int antennas_;
  double noise_;
};

}  // namespace

std::string_view to_string(Equalizer eq) { return eq == Equalizer::Zf ? "zf" : "mmse"; }

Equalizer parse_equalizer(std::string_view text) {
  if (text == "zf") return Equalizer::Zf;
  if (text == "mmse") return Equalizer::Mmse;
  throw DomainError("unknown equalizer '" + std::string(text) + "' (expected zf or mmse)");
}

UplinkInstance::UplinkInstance(ChannelRealization channel_, std::vector<double> weights_, double noise_power_,
                               std::size_t target_index_)
    : channel(std::move(channel_)), weights(std::move(weights_)), noise_power(noise_power_), target_index(target_index_) {
  detail::require(channel.devices() >= 1, "an uplink instance needs at least one stream");
  detail::require(static_cast<long>(weights.size()) == channel.devices(), "one weight per stream is required");
  for (double w : weights) detail::require_positive(w, "stream weight");
  detail::require_positive(noise_power, "noise_power");
  detail::require(static_cast<long>(target_index) < channel.devices(), "target index out of range");
}

std::optional<CMatrix> zf_equalizer(const CMatrix& channel, const std::vector<double>& weights) {
  const CMatrix a = weighted(channel, weights);
  auto inv = zf_gram_inverse(a);
  if (!inv) return std::nullopt;
  return CMatrix(*inv * a.adjoint());
}

CMatrix mmse_equalizer(const CMatrix& channel, const std::vector<double>& weights, double noise_power) {
  detail::require_positive(noise_power, "noise_power");
  const CMatrix a = weighted(channel, weights);
  const long m = a.rows();
  const CMatrix r = noise_power * CMatrix::Identity(m, m) + a * a.adjoint();
  return r.ldlt().solve(a).adjoint();
}

std::vector<double> zf_sinrs(const UplinkInstance& inst) {
  const CMatrix a = weighted(inst.channel.matrix(), inst.weights);
  std::vector<double> out(inst.weights.size(), 0.0);
  auto inv = zf_gram_inverse(a);
  if (!inv) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const long k = static_cast<long>(i);
    out[i] = 1.0 / (inst.noise_power * (*inv)(k, k).real());
  }
  return out;
}

std::vector<double> mmse_sinrs(const UplinkInstance& inst) {
  const CMatrix a = weighted(inst.channel.matrix(), inst.weights);
  std::vector<double> out(inst.weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mmse_stream_sinr(a, static_cast<long>(i), inst.noise_power);
  return out;
}

std::vector<double> sinrs(const UplinkInstance& inst, Equalizer eq) {
  return eq == Equalizer::Zf ? zf_sinrs(inst) : mmse_sinrs(inst);
}

double target_sinr(const UplinkInstance& inst, Equalizer eq) {
  const CMatrix a = weighted(inst.channel.matrix(), inst.weights);
  const long i = static_cast<long>(inst.target_index);
  if (eq == Equalizer::Mmse) return mmse_stream_sinr(a, i, inst.noise_power);
  auto inv = zf_gram_inverse(a);
  if (!inv) return 0.0;
  return 1.0 / (inst.noise_power * (*inv)(i, i).real());
}

std::vector<double> realized_sinrs(const CMatrix& q, const CMatrix& channel, const std::vector<double>& weights,
                                   double noise_power) {
  detail::require_positive(noise_power, "noise_power");
  const CMatrix a = weighted(channel, weights);
  detail::require(q.rows() == a.cols() && q.cols() == a.rows(), "filter shape does not match the channel");
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = realized_row_sinr(q, a, static_cast<long>(i), noise_power);
  return out;
}

double estimation_quality(const SystemParams& params, double csi_ul) {
  detail::require_positive(params.pilot_symbol_time, "pilot_symbol_time");
  detail::require_nonnegative(csi_ul, "csi_ul");
  detail::require_positive(params.noise_power, "noise_power");
  const double pilot_power = csi_ul / params.pilot_symbol_time;
  return pilot_power / (pilot_power + params.noise_power);
}

ChannelEstimate impaired_uplink_channel(const SystemParams& params, const CVector& true_channel, double csi_ul,
                                        Rng& rng) {
  const double rho = estimation_quality(params, csi_ul);
  const double k = params.rician_k;
  const std::complex<double> los(std::sqrt(k / (1.0 + k)), 0.0);
  // Per real dimension: variance rho (1 - rho) / (2 (1 + k)).
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * rho * (1.0 - rho) / (1.0 + k)));
  ChannelEstimate out;
  out.estimate.resize(true_channel.size());
  for (long j = 0; j < true_channel.size(); ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    out.estimate(j) = los + rho * (true_channel(j) - los) + std::complex<double>(re, im);
  }
  out.error = true_channel - out.estimate;
  return out;
}

double residual_self_interference(const SystemParams& params, WetScheme scheme, const SelfInterference& si) {
  detail::require(!std::isnan(si.attenuation_db), "self-interference attenuation must be a number");
  detail::require_finite(si.nearfield_gain_db, "nearfield_gain_db");
  if (si.attenuation_db == std::numeric_limits<double>::infinity()) return 0.0;
  const double antennas = scheme == WetScheme::Sa ? 1.0 : static_cast<double>(params.antennas_tx);
  return std::pow(10.0, (si.nearfield_gain_db - si.attenuation_db) / 10.0) * params.hap_power * antennas;
}

int receive_antennas(const SystemParams& params, WetScheme scheme) {
  return scheme == WetScheme::Sa ? params.antennas_total - 1 : params.antennas_total - params.antennas_tx;
}

long concurrent_streams(long num_devices, double period, double slot_time) {
  detail::require(num_devices >= 1, "num_devices must be at least 1");
  detail::require(period >= slot_time * (1.0 - 1e-12), "period must be at least one slot");
  const long slots = slots_in(period, slot_time);
  detail::require(slots >= 1, "period holds no whole slot");
  return (num_devices + slots - 1) / slots;
}

double pilot_cost_periodic(long num_devices, double period, double slot_time, double unit) {
  detail::require_nonnegative(unit, "pilot unit energy");
  return static_cast<double>(concurrent_streams(num_devices, period, slot_time)) * unit;
}

OutageEstimate info_outage_periodic(const SystemParams& params, const Deployment& deployment, double period,
                                    long trials, Rng& rng, const UplinkOptions& options) {
  detail::require(trials >= 1, "trials must be at least 1");
  const long s = static_cast<long>(deployment.size());
  const long n = std::min(concurrent_streams(s, period, params.slot_time), s);
  const auto order = deployment.order_by_gain();
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) {
    weights[static_cast<std::size_t>(j)] = params.tx_power * deployment.gain(order[static_cast<std::size_t>(j)]);
  }
  const double threshold = params.sinr_threshold();
  const TargetSinr sinr(params, options);
  long events = 0;
  for (long k = 0; k < trials; ++k) {
    if (sinr(weights, rng) < threshold) ++events;
  }
  return binomial_estimate(events, trials);
}

PoissonOutageEstimate info_outage_poisson(const SystemParams& params, const Deployment& deployment,
                                          const DiscreteExp& traffic, const PilotPlan& plan, long trials, Rng& rng,
                                          const UplinkOptions& options, bool eps_approximation) {
  detail::require(trials >= 1, "trials must be at least 1");
  const long s = static_cast<long>(deployment.size());
  detail::require(plan.num_sequences >= 1 && plan.num_sequences <= s, "pilot plan does not match the deployment");
  const double q = active_probability(traffic, params.slot_time, params.coherence_time);

  // Inverse-CDF table of N ~ Binomial(S, q) given N >= 1.
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double p_any = -std::expm1(static_cast<double>(s) * log_1mq);
  std::vector<double> cumulative(static_cast<std::size_t>(s));
  double acc = 0.0;
  for (long k = 1; k <= s; ++k) {
    const double log_pmf = std::lgamma(s + 1.0) - std::lgamma(k + 1.0) - std::lgamma(s - k + 1.0) + k * log_q +
                           static_cast<double>(s - k) * log_1mq;
    acc += std::exp(log_pmf) / p_any;
    cumulative[static_cast<std::size_t>(k - 1)] = acc;
  }

  const std::size_t worst = deployment.worst_index();
  std::vector<std::size_t> others;
  others.reserve(static_cast<std::size_t>(s - 1));
  for (std::size_t i = 0; i < deployment.size(); ++i) {
    if (i != worst) others.push_back(i);
  }

  const double threshold = params.sinr_threshold();
  const TargetSinr sinr(params, options);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> weights;
  long events = 0;
  for (long trial = 0; trial < trials; ++trial) {
    const double u = unif(rng);
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    const long n = it == cumulative.end() ? s : static_cast<long>(it - cumulative.begin()) + 1;
    weights.assign(1, params.tx_power * deployment.worst_gain());
    // Partial Fisher-Yates: the first n - 1 entries become a uniform subset.
    for (long j = 0; j < n - 1; ++j) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(j), others.size() - 1);
      std::swap(others[static_cast<std::size_t>(j)], others[pick(rng)]);
      weights.push_back(params.tx_power * deployment.gain(others[static_cast<std::size_t>(j)]));
    }
    if (sinr(weights, rng) < threshold) ++events;
  }

  PoissonOutageEstimate out;
  out.decoding = binomial_estimate(events, trials);
  const bool approximate = eps_approximation && plan.num_sequences < s;
  out.collision = approximate ? plan.target_collision : plan.collision;
  out.value = out.collision + (1.0 - out.collision) * out.decoding.value;
  out.ci_half_width = (1.0 - out.collision) * out.decoding.ci_half_width;
  return out;
}

}  // namespace wpcn

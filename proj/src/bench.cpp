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

#include "wpcn/bench.hpp"

#include "wpcn/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <thread>

namespace wpcn {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Energy outage of the worst device when the HAP solves the max-min beamformer
// in every block. `blocks` draws the number of blocks between two messages and
// `budget` gives E_0 for it.
template <class Blocks, class Budget>
OutageEstimate sdp_energy_outage(const SystemParams& p, const Deployment& dep, long trials, Rng& rng, Blocks blocks,
                                 Budget budget) {
  detail::require(p.antennas_tx >= 1, "csi_sdp needs at least one transmit antenna");
  const std::size_t worst = dep.worst_index();
  std::vector<CVector> channels(dep.size());
  long events = 0;
  for (long k = 0; k < trials; ++k) {
    const long n = blocks(rng);
    double harvested = 0.0;
    for (long b = 0; b < n; ++b) {
      for (auto& h : channels) h = sample_rician(p.antennas_tx, p.rician_k, rng);
      Precoder w;
      try {
        w = solve_fair_beamforming(channels, dep.gains(), p.hap_power);
      } catch (const ConvergenceError& e) {
        w = e.best();
      }
      harvested += p.conversion_eff * p.coherence_time *
                   incident_power(w, channels[worst], dep.worst_gain(), p.hap_power);
    }
    if (harvested < budget(n)) ++events;
  }
  OutageEstimate e;
  e.trials = trials;
  e.events = events;
  e.value = static_cast<double>(events) / static_cast<double>(trials);
  e.ci_half_width = kZ95 * std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  return e;
}

std::string format_value(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

double overall_outage(double energy, double info) {
  detail::require_probability(energy, "energy outage");
  detail::require_probability(info, "information outage");
  // Same as 1 - (1 - energy)(1 - info), without cancellation for tiny outages.
  return energy + info * (1.0 - energy);
}

OutageBreakdown evaluate_point(const ScenarioConfig& config, std::uint64_t stream) {
  config.validate();
  const SystemParams p = config.resolved_params();
  const Deployment dep = config.deployment.build();
  const long s = static_cast<long>(dep.size());
  const std::uint64_t point_seed = make_stream(config.seed, stream)();
  Rng energy_rng = make_stream(point_seed, 0);
  Rng info_rng = make_stream(point_seed, 1);

  UplinkOptions uplink;
  uplink.equalizer = config.equalizer;
  uplink.wet_scheme = config.wet_scheme;
  uplink.self_interference = config.self_interference;
  uplink.imperfect_csi = config.imperfect_ul_csi;
  uplink.csi_ul = p.ul_pilot_unit_energy;

  OutageBreakdown out;
  out.trials = config.trials;
  double energy_ci = 0.0;
  double info_ci = 0.0;

  if (config.traffic == TrafficMode::Periodic) {
    out.pilots = concurrent_streams(s, config.period, p.slot_time);
    out.csi_ul = static_cast<double>(out.pilots) * p.ul_pilot_unit_energy;
    if (config.wet_scheme == WetScheme::CsiSdp) {
      const long n = blocks_spanned(config.period, p.coherence_time);
      const double e0 = energy_budget_periodic(p, config.wet_scheme, config.period, out.csi_ul).total;
      const auto est = sdp_energy_outage(
          p, dep, config.trials, energy_rng, [n](Rng&) { return n; }, [e0](long) { return e0; });
      out.energy = est.value;
      energy_ci = est.ci_half_width;
    } else {
      out.energy = energy_outage_periodic(p, dep.worst_gain(), config.period, out.csi_ul, config.wet_scheme);
    }
    const auto info = info_outage_periodic(p, dep, config.period, config.trials, info_rng, uplink);
    out.info = info.value;
    info_ci = info.ci_half_width;
  } else {
    const DiscreteExp traffic(config.traffic_rate());
    const PilotPlan plan = optimal_pilot_count(s, config.epsilon, traffic, p.slot_time, p.coherence_time,
                                               config.pilot_tol);
    out.pilots = plan.num_sequences;
    out.pilot_iterations = plan.iterations_used;
    out.csi_ul = static_cast<double>(plan.num_sequences) * p.ul_pilot_unit_energy;
    if (config.wet_scheme == WetScheme::CsiSdp) {
      const double csi_ul = out.csi_ul;
      const auto est = sdp_energy_outage(
          p, dep, config.trials, energy_rng, [&traffic](Rng& r) { return traffic.sample(r); },
          [&](long v) { return energy_budget_poisson(p, config.wet_scheme, v, csi_ul).total; });
      out.energy = est.value;
      energy_ci = est.ci_half_width;
    } else {
      PoissonEnergyOptions opts;
      opts.v_max = config.v_max;
      out.energy = energy_outage_poisson(p, dep.worst_gain(), traffic, out.csi_ul, config.wet_scheme, opts);
    }
    const auto info =
        info_outage_poisson(p, dep, traffic, plan, config.trials, info_rng, uplink, config.eps_approx);
    out.info = info.value;
    info_ci = info.ci_half_width;
  }
  out.overall = overall_outage(out.energy, out.info);
  // Delta-method combination; the two estimates use independent substreams.
  out.ci_half_width = std::hypot((1.0 - out.info) * energy_ci, (1.0 - out.energy) * info_ci);
  return out;
}

SweepTable run_sweep(const ScenarioConfig& config, unsigned threads) {
  config.validate();
  SweepTable table;
  table.param = config.sweep.param.empty() ? std::string("point") : config.sweep.param;
  const std::vector<double> grid = config.sweep.param.empty() ? std::vector<double>{0.0} : config.sweep.values;
  table.rows.resize(grid.size());

  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        ScenarioConfig point = config;
        if (!config.sweep.param.empty()) apply_setting(point, config.sweep.param, format_value(grid[k]));
        table.rows[k].value = grid[k];
        table.rows[k].outage = evaluate_point(point, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, grid.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!errors[k]) continue;
    const std::string where = "sweep point " + table.param + " = " + format_value(grid[k]) + ": ";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }
  return table;
}

void write_csv(std::ostream& os, const SweepTable& table) {
  const auto old_locale = os.imbue(std::locale::classic());
  const auto old_precision = os.precision(12);
  os << table.param << ",energy_outage,info_outage,overall_outage,ci_half_width,trials,pilots,pilot_iterations,"
        "csi_ul_j\n";
  for (const auto& row : table.rows) {
    const auto& o = row.outage;
    os << row.value << ',' << o.energy << ',' << o.info << ',' << o.overall << ',' << o.ci_half_width << ','
       << o.trials << ',' << o.pilots << ',' << o.pilot_iterations << ',' << o.csi_ul << '\n';
  }
  os.precision(old_precision);
  os.imbue(old_locale);
}

}  // namespace wpcn

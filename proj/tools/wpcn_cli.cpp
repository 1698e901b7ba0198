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
//
// wpcn: command-line front end for outage sweeps, pilot planning and energy
// beamforming.

#include "wpcn/bench.hpp"
#include "wpcn/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace {

using namespace wpcn;

ScenarioConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  ScenarioConfig cfg = path.empty() ? ScenarioConfig::defaults() : load_config(path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage evaluation for wireless powered IoT networks"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "evaluate a parameter sweep and write a CSV table");
  std::string sweep_config;
  std::string sweep_output;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<long> sweep_trials;
  std::vector<std::string> sweep_sets;
  unsigned sweep_threads = 0;
  sweep->add_option("-c,--config", sweep_config, "scenario file (defaults when omitted)");
  sweep->add_option("-o,--output", sweep_output, "CSV output path ('-' for stdout)")->required();
  sweep->add_option("--seed", sweep_seed, "override the seed");
  sweep->add_option("--trials", sweep_trials, "override the Monte Carlo trial count");
  sweep->add_option("--set", sweep_sets, "override any key, e.g. --set wet_scheme=csi_mrt");
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = all cores)");

  // pilot-plan
  auto* pilots = app.add_subcommand("pilot-plan", "smallest pilot pool meeting a collision target");
  long pp_devices = 100;
  double pp_eps = 0.1;
  double pp_rate = 0.25;
  double pp_slot = 0.02;
  double pp_coherence = 0.4;
  double pp_tol = 1e-5;
  pilots->add_option("-S,--devices", pp_devices, "number of devices")->capture_default_str();
  pilots->add_option("-e,--epsilon", pp_eps, "target collision probability")->capture_default_str();
  pilots->add_option("-l,--rate", pp_rate, "traffic rate lambda")->capture_default_str();
  pilots->add_option("-t,--slot", pp_slot, "slot duration, s")->capture_default_str();
  pilots->add_option("-T,--coherence", pp_coherence, "coherence time, s")->capture_default_str();
  pilots->add_option("--tol", pp_tol, "fixed-point tolerance")->capture_default_str();

  // solve-eb
  auto* eb = app.add_subcommand("solve-eb", "solve max-min energy beamforming for one channel draw");
  std::string eb_config;
  std::vector<std::string> eb_sets;
  std::uint64_t eb_seed = 1;
  double eb_tol = 1e-4;
  long eb_iter = 50000;
  eb->add_option("-c,--config", eb_config, "scenario file (defaults when omitted)");
  eb->add_option("--set", eb_sets, "override any key");
  eb->add_option("--seed", eb_seed, "channel draw seed")->capture_default_str();
  eb->add_option("--tol", eb_tol, "relative duality-gap tolerance")->capture_default_str();
  eb->add_option("--max-iter", eb_iter, "iteration budget")->capture_default_str();

  // defaults
  auto* defaults = app.add_subcommand("defaults", "print the default scenario file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      ScenarioConfig cfg = load_with_overrides(sweep_config, sweep_sets);
      if (sweep_seed) cfg.seed = *sweep_seed;
      if (sweep_trials) cfg.trials = *sweep_trials;
      const SweepTable table = run_sweep(cfg, sweep_threads);
      if (sweep_output == "-") {
        write_csv(std::cout, table);
      } else {
        std::ofstream out(sweep_output);
        if (!out) throw DomainError("cannot write '" + sweep_output + "'");
        write_csv(out, table);
      }
    } else if (*pilots) {
      const DiscreteExp traffic(pp_rate);
      const PilotPlan plan = optimal_pilot_count(pp_devices, pp_eps, traffic, pp_slot, pp_coherence, pp_tol);
      std::cout << std::setprecision(12) << "L* = " << plan.num_sequences << '\n'
                << "L0 = " << plan.initial_guess << '\n'
                << "iterations = " << plan.iterations_used << '\n'
                << "reuse_factor = " << plan.reuse_factor << '\n'
                << "collision = " << plan.collision << '\n';
    } else if (*eb) {
      const ScenarioConfig cfg = load_with_overrides(eb_config, eb_sets);
      cfg.validate();
      const SystemParams p = cfg.resolved_params();
      const Deployment dep = cfg.deployment.build();
      Rng rng = make_stream(eb_seed, 0);
      std::vector<CVector> channels;
      for (std::size_t i = 0; i < dep.size(); ++i) channels.push_back(sample_rician(p.antennas_tx, p.rician_k, rng));
      const BeamformingReport r = solve_fair_beamforming_report(channels, dep.gains(), p.hap_power, eb_tol, eb_iter);
      const double mrt = min_incident_power(mrt_precoder(channels[dep.worst_index()]).gram, channels, dep.gains(),
                                            p.hap_power);
      std::cout << std::setprecision(12) << "zeta_w = " << *r.precoder.objective << '\n'
                << "upper_bound_w = " << r.upper_bound << '\n'
                << "beams = " << r.precoder.beams.size() << '\n'
                << "iterations = " << r.iterations << '\n'
                << "mrt_zeta_w = " << mrt << '\n';
    } else if (*defaults) {
      std::cout << serialize_config(ScenarioConfig::defaults());
    }
  } catch (const DomainError& e) {
    std::cerr << "wpcn: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wpcn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

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

#ifndef WPCN_BENCH_HPP
#define WPCN_BENCH_HPP

#include "wpcn/numerics.hpp"
#include "wpcn/scenario.hpp"
#include "wpcn/wet.hpp"
#include "wpcn/wit.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpcn {

enum class TrafficMode { Periodic, Poisson };

std::string_view to_string(TrafficMode mode);
TrafficMode parse_traffic_mode(std::string_view text);

/// Devices on concentric rings, gains from the log-distance model.
struct DeploymentSpec {
  long num_devices = 100;
  std::vector<double> ring_radii{2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  double pl_exponent = 2.7;
  double fixed_loss_db = 16.0;

  Deployment build() const;
  bool operator==(const DeploymentSpec&) const = default;
};

struct SweepSpec {
  std::string param;          ///< any numeric config key; empty = single point
  std::vector<double> values;

  bool operator==(const SweepSpec&) const = default;
};

/// Everything needed to evaluate one figure family.
///
/// Energies given in dBm (`xi0_dbm`, `xi0_ul_dbm`) are read as a power held for
/// one second, i.e. 10^{(x-30)/10} joules.
struct ScenarioConfig {
  SystemParams params = SystemParams::defaults();
  double noise_power_dbm = -94.0;
  double xi0_dbm = -20.0;
  double xi0_ul_dbm = -30.0;
  DeploymentSpec deployment{};
  TrafficMode traffic = TrafficMode::Periodic;
  double period = 1.6;                ///< t_s
  std::optional<double> rate;         ///< lambda; empty = T_c / t_s
  double epsilon = 0.1;               ///< target collision probability
  double pilot_tol = 1e-5;
  WetScheme wet_scheme = WetScheme::Sa;
  Equalizer equalizer = Equalizer::Mmse;
  SelfInterference self_interference{};
  bool imperfect_ul_csi = false;
  bool eps_approx = false;
  long v_max = 0;                     ///< 0 = ceil(10 E[V])
  long trials = 10000;
  std::uint64_t seed = 1;
  SweepSpec sweep{};

  static ScenarioConfig defaults() { return ScenarioConfig{}; }

  /// SystemParams with the dBm-specified quantities filled in.
  SystemParams resolved_params() const;
  double traffic_rate() const;
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the flat `key = value` format; `#` starts a comment. Unknown or
/// repeated keys are errors. Missing keys keep their defaults.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Writes every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Sets one key from its textual value (the CLI `--set key=value` path).
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Keys that a sweep may vary.
std::vector<std::string> numeric_keys();

/// Outage composition 1 - (1 - energy)(1 - info).
double overall_outage(double energy, double info);

struct OutageBreakdown {
  double energy = 0.0;
  double info = 0.0;
  double overall = 0.0;
  double ci_half_width = 0.0;  ///< Monte Carlo half-width (energy and info combined)
  long trials = 0;
  long pilots = 0;             ///< L* (Poisson) or concurrent streams (periodic)
  long pilot_iterations = 0;
  double csi_ul = 0.0;         ///< uplink CSI energy charged to the worst device, J
};

/// Energy and information outage of the worst device for one configuration.
OutageBreakdown evaluate_point(const ScenarioConfig& config, std::uint64_t stream);

struct SweepRow {
  double value = 0.0;
  OutageBreakdown outage;
};

struct SweepTable {
  std::string param;
  std::vector<SweepRow> rows;
};

/// Evaluates every grid point (concurrently when `threads` != 1; 0 = hardware
/// concurrency). Point k draws from substream k of the seed, so the table does
/// not depend on the thread count.
SweepTable run_sweep(const ScenarioConfig& config, unsigned threads = 0);

/// Comma-separated table with a header row; classic locale, 12 significant digits.
void write_csv(std::ostream& os, const SweepTable& table);

}  // namespace wpcn

#endif  // WPCN_BENCH_HPP

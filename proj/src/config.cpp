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
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <set>
#include <sstream>

namespace wpcn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || std::isnan(value)) {
    throw DomainError("key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
  }
  return value;
}

long parse_long(std::string_view text, std::string_view key) {
  const double v = parse_double(text, key);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw DomainError("key '" + std::string(key) + "': '" + std::string(trim(text)) + "' is not an integer");
  }
  return static_cast<long>(v);
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw DomainError("key '" + std::string(key) + "': '" + std::string(text) + "' is not a boolean");
}

std::vector<double> parse_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

struct Key {
  const char* name;
  bool numeric;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

// Helpers binding a key to a field through an accessor.
template <class Access>
Key real_key(const char* name, Access access) {
  return Key{name, true,
             [=](ScenarioConfig& c, std::string_view v) { access(c) = parse_double(v, name); },
             [=](const ScenarioConfig& c) { return format_double(access(c)); }};
}

template <class Access>
Key int_key(const char* name, Access access) {
  return Key{name, true,
             [=](ScenarioConfig& c, std::string_view v) {
               using T = std::remove_reference_t<decltype(access(c))>;
               access(c) = static_cast<T>(parse_long(v, name));
             },
             [=](const ScenarioConfig& c) { return std::to_string(access(c)); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      real_key("hap_power_w", [](auto& c) -> auto& { return c.params.hap_power; }),
      real_key("noise_power_dbm", [](auto& c) -> auto& { return c.noise_power_dbm; }),
      real_key("conversion_eff", [](auto& c) -> auto& { return c.params.conversion_eff; }),
      real_key("rician_k", [](auto& c) -> auto& { return c.params.rician_k; }),
      real_key("coherence_time_s", [](auto& c) -> auto& { return c.params.coherence_time; }),
      real_key("slot_time_s", [](auto& c) -> auto& { return c.params.slot_time; }),
      real_key("tx_power_w", [](auto& c) -> auto& { return c.params.tx_power; }),
      real_key("circuit_power_w", [](auto& c) -> auto& { return c.params.circuit_power; }),
      real_key("xi0_dbm", [](auto& c) -> auto& { return c.xi0_dbm; }),
      real_key("xi0_ul_dbm", [](auto& c) -> auto& { return c.xi0_ul_dbm; }),
      real_key("spectral_msg_bits_hz", [](auto& c) -> auto& { return c.params.spectral_msg; }),
      int_key("antennas_total", [](auto& c) -> auto& { return c.params.antennas_total; }),
      int_key("antennas_tx", [](auto& c) -> auto& { return c.params.antennas_tx; }),
      real_key("pilot_symbol_time_s", [](auto& c) -> auto& { return c.params.pilot_symbol_time; }),
      int_key("num_devices", [](auto& c) -> auto& { return c.deployment.num_devices; }),
      Key{"ring_radii_m", false,
          [](ScenarioConfig& c, std::string_view v) { c.deployment.ring_radii = parse_list(v, "ring_radii_m"); },
          [](const ScenarioConfig& c) { return format_list(c.deployment.ring_radii); }},
      real_key("pl_exponent", [](auto& c) -> auto& { return c.deployment.pl_exponent; }),
      real_key("fixed_loss_db", [](auto& c) -> auto& { return c.deployment.fixed_loss_db; }),
      Key{"traffic", false, [](ScenarioConfig& c, std::string_view v) { c.traffic = parse_traffic_mode(trim(v)); },
          [](const ScenarioConfig& c) { return std::string(to_string(c.traffic)); }},
      real_key("period_s", [](auto& c) -> auto& { return c.period; }),
      Key{"rate", true,
          [](ScenarioConfig& c, std::string_view v) {
            if (trim(v) == "auto") {
              c.rate.reset();
            } else {
              c.rate = parse_double(v, "rate");
            }
          },
          [](const ScenarioConfig& c) { return c.rate ? format_double(*c.rate) : std::string("auto"); }},
      real_key("epsilon", [](auto& c) -> auto& { return c.epsilon; }),
      real_key("pilot_tol", [](auto& c) -> auto& { return c.pilot_tol; }),
      Key{"wet_scheme", false, [](ScenarioConfig& c, std::string_view v) { c.wet_scheme = parse_wet_scheme(trim(v)); },
          [](const ScenarioConfig& c) { return std::string(to_string(c.wet_scheme)); }},
      Key{"equalizer", false, [](ScenarioConfig& c, std::string_view v) { c.equalizer = parse_equalizer(trim(v)); },
          [](const ScenarioConfig& c) { return std::string(to_string(c.equalizer)); }},
      real_key("si_attenuation_db", [](auto& c) -> auto& { return c.self_interference.attenuation_db; }),
      real_key("nearfield_gain_db", [](auto& c) -> auto& { return c.self_interference.nearfield_gain_db; }),
      Key{"imperfect_ul_csi", false,
          [](ScenarioConfig& c, std::string_view v) { c.imperfect_ul_csi = parse_bool(v, "imperfect_ul_csi"); },
          [](const ScenarioConfig& c) { return std::string(c.imperfect_ul_csi ? "true" : "false"); }},
      Key{"eps_approx", false, [](ScenarioConfig& c, std::string_view v) { c.eps_approx = parse_bool(v, "eps_approx"); },
          [](const ScenarioConfig& c) { return std::string(c.eps_approx ? "true" : "false"); }},
      Key{"v_max", true,
          [](ScenarioConfig& c, std::string_view v) { c.v_max = trim(v) == "auto" ? 0 : parse_long(v, "v_max"); },
          [](const ScenarioConfig& c) { return c.v_max == 0 ? std::string("auto") : std::to_string(c.v_max); }},
      int_key("trials", [](auto& c) -> auto& { return c.trials; }),
      Key{"seed", false,
          [](ScenarioConfig& c, std::string_view v) {
            v = trim(v);
            std::uint64_t s = 0;
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
            if (ec != std::errc() || ptr != v.data() + v.size()) {
              throw DomainError("key 'seed': '" + std::string(v) + "' is not an unsigned 64-bit integer");
            }
            c.seed = s;
          },
          [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      Key{"sweep.param", false, [](ScenarioConfig& c, std::string_view v) { c.sweep.param = std::string(trim(v)); },
          [](const ScenarioConfig& c) { return c.sweep.param; }},
      Key{"sweep.values", false,
          [](ScenarioConfig& c, std::string_view v) { c.sweep.values = parse_list(v, "sweep.values"); },
          [](const ScenarioConfig& c) { return format_list(c.sweep.values); }},
  };
  return table;
}

const Key& find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (name == k.name) return k;
  }
  throw DomainError("unknown config key '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(TrafficMode mode) { return mode == TrafficMode::Periodic ? "periodic" : "poisson"; }

TrafficMode parse_traffic_mode(std::string_view text) {
  if (text == "periodic") return TrafficMode::Periodic;
  if (text == "poisson") return TrafficMode::Poisson;
  throw DomainError("unknown traffic mode '" + std::string(text) + "' (expected periodic or poisson)");
}

Deployment DeploymentSpec::build() const {
  return ring_deployment(num_devices, ring_radii, pl_exponent, fixed_loss_db);
}

SystemParams ScenarioConfig::resolved_params() const {
  SystemParams p = params;
  p.noise_power = dbm_to_watts(noise_power_dbm);
  p.dl_pilot_unit_energy = dbm_to_watts(xi0_dbm) * 1.0;     // 1 s reference
  p.ul_pilot_unit_energy = dbm_to_watts(xi0_ul_dbm) * 1.0;  // 1 s reference
  return p;
}

double ScenarioConfig::traffic_rate() const { return rate ? *rate : params.coherence_time / period; }

void ScenarioConfig::validate() const {
  detail::require_finite(noise_power_dbm, "noise_power_dbm");
  detail::require_finite(xi0_dbm, "xi0_dbm");
  detail::require_finite(xi0_ul_dbm, "xi0_ul_dbm");
  resolved_params().validate();
  (void)ring_counts(deployment.num_devices, deployment.ring_radii);
  detail::require_finite(deployment.pl_exponent, "pl_exponent");
  detail::require_finite(deployment.fixed_loss_db, "fixed_loss_db");
  detail::require(period >= params.slot_time, "period_s must be at least one slot");
  detail::require(trials >= 1, "trials must be at least 1");
  detail::require(v_max >= 0, "v_max must be positive (or auto)");
  detail::require_positive(pilot_tol, "pilot_tol");
  if (traffic == TrafficMode::Poisson) {
    const double lam = traffic_rate();
    detail::require(lam > 0.0 && lam < 1.0, "the Poisson rate must lie in (0, 1); got " + format_double(lam));
    detail::require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  }
  if (!sweep.param.empty()) {
    const Key& k = find_key(sweep.param);
    detail::require(k.numeric, "sweep.param '" + sweep.param + "' is not a numeric key");
    detail::require(!sweep.values.empty(), "sweep.values must not be empty");
  } else {
    detail::require(sweep.values.empty(), "sweep.values given without sweep.param");
  }
}

void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value) {
  find_key(trim(key)).set(config, value);
}

std::vector<std::string> numeric_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) {
    if (k.numeric) out.emplace_back(k.name);
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DomainError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) {
      throw DomainError("config line " + std::to_string(line_no) + ": key '" + key + "' repeated");
    }
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const DomainError& e) {
      throw DomainError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "# wpcn scenario (energies in dBm are taken over a 1 s reference)\n";
  for (const auto& k : keys()) os << k.name << " = " << k.get(config) << '\n';
  return os.str();
}

}  // namespace wpcn

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

#include "oracles.hpp"
#include "wpcn/error.hpp"
#include "wpcn/wit.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace wpcn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<double> kRadii{2.0, 4.0, 6.0, 8.0, 10.0, 12.0};

Deployment reference_deployment(long s = 100) { return ring_deployment(s, kRadii, 2.7, 16.0); }

UplinkInstance random_instance(long m_r, long n, double kappa, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = u(rng);
  return UplinkInstance(ChannelRealization::draw(m_r, n, kappa, rng), w, 0.3);
}

}  // namespace

TEST_CASE("equalizer names", "[wit]") {
  CHECK(parse_equalizer("zf") == Equalizer::Zf);
  CHECK(parse_equalizer("mmse") == Equalizer::Mmse);
  CHECK(to_string(Equalizer::Zf) == "zf");
  CHECK_THROWS_AS(parse_equalizer("mrc"), DomainError);
}

TEST_CASE("uplink instance validation", "[wit]") {
  const ChannelRealization h(CMatrix::Ones(2, 2));
  CHECK_THROWS_AS(UplinkInstance(h, {1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(UplinkInstance(h, {1.0, 0.0}, 1.0), DomainError);
  CHECK_THROWS_AS(UplinkInstance(h, {1.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(UplinkInstance(h, {1.0, 1.0}, 1.0, 2), DomainError);
}

TEST_CASE("single stream reduces to the matched filter", "[wit]") {
  Rng rng = make_stream(41, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const CVector h = sample_rician(3, 5.0, rng);
    const UplinkInstance inst(ChannelRealization(CMatrix(h)), {2e-9}, 1e-13);
    const double expected = 2e-9 * h.squaredNorm() / 1e-13;
    CHECK_THAT(zf_sinrs(inst)[0], WithinRel(expected, 1e-10));
    CHECK_THAT(mmse_sinrs(inst)[0], WithinRel(expected, 1e-10));
  }
}

TEST_CASE("orthogonal streams do not interfere", "[wit]") {
  CMatrix h = CMatrix::Zero(4, 3);
  h(0, 0) = {1.0, 0.5};
  h(1, 1) = {-0.3, 0.7};
  h(2, 2) = 2.0;
  h(3, 2) = {0.0, -1.0};
  const std::vector<double> w{1.0, 3.0, 0.5};
  const UplinkInstance inst{ChannelRealization(h), w, 0.2};
  const auto zf = zf_sinrs(inst);
  const auto mmse = mmse_sinrs(inst);
  for (long j = 0; j < 3; ++j) {
    const double expected = w[static_cast<std::size_t>(j)] * h.col(j).squaredNorm() / 0.2;
    CHECK_THAT(zf[static_cast<std::size_t>(j)], WithinRel(expected, 1e-12));
    CHECK_THAT(mmse[static_cast<std::size_t>(j)], WithinRel(expected, 1e-12));
  }
}

TEST_CASE("ZF cancels interference exactly and MMSE dominates it", "[wit][properties]") {
  Rng rng = make_stream(42, 0);
  for (int rep = 0; rep < 500; ++rep) {
    const long m_r = 2 + rep % 5;
    const long n = 1 + rep % m_r;
    const UplinkInstance inst = random_instance(m_r, n, rep % 2 == 0 ? 0.0 : 5.0, rng);
    const auto q = zf_equalizer(inst.channel.matrix(), inst.weights);
    REQUIRE(q);
    CMatrix a = inst.channel.matrix();
    for (long j = 0; j < n; ++j) a.col(j) *= std::sqrt(inst.weights[static_cast<std::size_t>(j)]);
    REQUIRE(((*q) * a - CMatrix::Identity(n, n)).norm() <= 1e-8);
    const auto zf = zf_sinrs(inst);
    const auto mmse = mmse_sinrs(inst);
    for (long j = 0; j < n; ++j) REQUIRE(mmse[static_cast<std::size_t>(j)] >= zf[static_cast<std::size_t>(j)] - 1e-9);
    // The closed forms agree with the SINR realized by the explicit filters.
    const auto zf_real = realized_sinrs(*q, inst.channel.matrix(), inst.weights, inst.noise_power);
    const auto mmse_real = realized_sinrs(mmse_equalizer(inst.channel.matrix(), inst.weights, inst.noise_power),
                                          inst.channel.matrix(), inst.weights, inst.noise_power);
    for (long j = 0; j < n; ++j) {
      REQUIRE_THAT(zf_real[static_cast<std::size_t>(j)], WithinRel(zf[static_cast<std::size_t>(j)], 1e-8));
      REQUIRE_THAT(mmse_real[static_cast<std::size_t>(j)], WithinRel(mmse[static_cast<std::size_t>(j)], 1e-8));
    }
  }
}

TEST_CASE("ZF infeasibility is scored as outage", "[wit]") {
  Rng rng = make_stream(43, 0);
  const UplinkInstance over = random_instance(2, 3, 1.0, rng);
  for (double s : zf_sinrs(over)) CHECK(s == 0.0);
  CHECK(target_sinr(over, Equalizer::Zf) == 0.0);
  CHECK(target_sinr(over, Equalizer::Mmse) > 0.0);
  CHECK_FALSE(zf_equalizer(over.channel.matrix(), over.weights));
  CMatrix rank1(3, 2);
  rank1.col(0) = CVector::Ones(3);
  rank1.col(1) = CVector::Ones(3) * 2.0;
  const UplinkInstance singular(ChannelRealization(rank1), {1.0, 1.0}, 1.0);
  for (double s : zf_sinrs(singular)) CHECK(s == 0.0);
}

TEST_CASE("MMSE SINR vanishes under unbounded aligned interference", "[wit]") {
  const CVector h = CVector::Ones(3);
  CMatrix m(3, 2);
  m.col(0) = h;
  m.col(1) = h;
  double prev = INFINITY;
  for (double w : {1.0, 1e2, 1e4, 1e8}) {
    const UplinkInstance inst(ChannelRealization(m), {1.0, w}, 0.1);
    const double s = mmse_sinrs(inst)[0];
    CHECK(s < prev);
    prev = s;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("Rayleigh ZF gain law", "[wit]") {
  // Z = 1/[(H^H H)^{-1}]_ii is Gamma(M_r - N + 1, 1) for CN(0, 1) entries.
  for (auto [m_r, n] : std::vector<std::pair<long, long>>{{6, 3}, {3, 1}, {4, 4}}) {
    Rng rng = make_stream(44, static_cast<std::uint64_t>(m_r * 10 + n));
    std::vector<double> z(20000);
    for (auto& v : z) {
      const UplinkInstance inst(ChannelRealization::draw(m_r, n, 0.0, rng), std::vector<double>(n, 1.0), 1.0);
      v = zf_sinrs(inst)[0];
    }
    const double shape = static_cast<double>(m_r - n + 1);
    INFO("M_r=" << m_r << " N=" << n);
    CHECK(oracle::ks_statistic(z, [&](double x) { return boost::math::gamma_p(shape, x); }) <
          oracle::ks_critical_1pct(z.size()));
  }
}

TEST_CASE("receive antennas and self-interference", "[wit]") {
  SystemParams p = SystemParams::defaults();
  CHECK(receive_antennas(p, WetScheme::CsiMrt) == 3);
  CHECK(receive_antennas(p, WetScheme::Sa) == 5);
  CHECK(residual_self_interference(p, WetScheme::CsiMrt, {}) == 0.0);
  const SelfInterference si{100.0, 10.0};
  CHECK_THAT(residual_self_interference(p, WetScheme::CsiMrt, si), WithinRel(1e-9 * 10.0 * 3.0, 1e-12));
  CHECK_THAT(residual_self_interference(p, WetScheme::Sa, si), WithinRel(1e-9 * 10.0, 1e-12));
  CHECK_THROWS_AS(residual_self_interference(p, WetScheme::Sa, {NAN, 0.0}), DomainError);
}

TEST_CASE("imperfect uplink CSI decomposition", "[wit]") {
  SystemParams p = SystemParams::defaults();
  const double k = p.rician_k;
  const std::complex<double> los(std::sqrt(k / (1.0 + k)), 0.0);
  SECTION("no pilot energy leaves only the LOS mean") {
    Rng rng = make_stream(45, 0);
    const CVector h = sample_rician(4, k, rng);
    const auto e = impaired_uplink_channel(p, h, 0.0, rng);
    for (long j = 0; j < 4; ++j) CHECK(e.estimate(j) == los);
    CHECK((e.estimate + e.error - h).norm() < 1e-15);
  }
  SECTION("abundant pilot energy gives a vanishing error") {
    Rng rng = make_stream(46, 0);
    const CVector h = sample_rician(4, k, rng);
    const auto e = impaired_uplink_channel(p, h, 1e3, rng);
    CHECK(e.error.norm() < 1e-6);
    CHECK(estimation_quality(p, 1e3) > 1.0 - 1e-12);
  }
  SECTION("moments") {
    const double csi_ul = 1e-6 * p.pilot_symbol_time * 1e-7;  // pilot SNR of order one at 1e-13 W noise
    const double rho = estimation_quality(p, csi_ul);
    REQUIRE(rho > 0.05);
    REQUIRE(rho < 0.95);
    Rng rng = make_stream(47, 0);
    const long n = 100000;
    double var_est = 0.0;
    double var_err = 0.0;
    std::complex<double> cross = 0.0;
    std::complex<double> mean_err = 0.0;
    for (long i = 0; i < n; ++i) {
      const CVector h = sample_rician(1, k, rng);
      const auto e = impaired_uplink_channel(p, h, csi_ul, rng);
      const std::complex<double> de = e.estimate(0) - los;
      var_est += std::norm(de);
      var_err += std::norm(e.error(0));
      cross += de * std::conj(e.error(0));
      mean_err += e.error(0);
    }
    var_est /= n;
    var_err /= n;
    const double total = 1.0 / (1.0 + k);
    CHECK_THAT(var_est, WithinRel(rho * total, 0.02));
    CHECK_THAT(var_err, WithinRel((1.0 - rho) * total, 0.02));
    CHECK_THAT(var_est + var_err, WithinRel(total, 0.02));
    CHECK(std::abs(cross / static_cast<double>(n)) < 5.0 * total / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mean_err / static_cast<double>(n)) < 5.0 * std::sqrt(total / n));
  }
}

TEST_CASE("periodic pilot cost and scheduling", "[wit]") {
  CHECK(pilot_cost_periodic(100, 1.6, 0.02, 1e-6) == 2e-6);
  CHECK(pilot_cost_periodic(50, 1.6, 0.02, 1e-6) == 1e-6);
  CHECK(pilot_cost_periodic(1, 1.6, 0.02, 1e-6) == 1e-6);
  CHECK(concurrent_streams(100, 0.2, 0.02) == 10);
  CHECK_THROWS_AS(pilot_cost_periodic(10, 0.01, 0.02, 1e-6), DomainError);
}

TEST_CASE("periodic information outage", "[wit]") {
  const Deployment dep = reference_deployment();
  SystemParams p = SystemParams::defaults();
  p.noise_power = 1e-7;  // moderate outage so the grids are informative
  UplinkOptions opts;

  SECTION("zero rate never fails, infinite noise always does") {
    SystemParams q = p;
    q.spectral_msg = 0.0;
    Rng rng = make_stream(48, 0);
    CHECK(info_outage_periodic(q, dep, 1.6, 2000, rng, opts).value == 0.0);
    q = p;
    q.noise_power = 1e30;
    CHECK(info_outage_periodic(q, dep, 1.6, 2000, rng, opts).value == 1.0);
  }
  SECTION("single stream matches the closed form") {
    // t_s = 2 s gives 100 slots, so the worst device transmits alone.
    const double snr = p.tx_power * dep.worst_gain() / p.noise_power;
    const double m_r = p.antennas_rx();
    const double k = p.rician_k;
    const double y = 2.0 * (1.0 + k) * p.sinr_threshold() / snr;
    const double analytic = oracle::boost_ncx2_cdf(2.0 * m_r, 2.0 * m_r * k, y);
    for (auto eq : {Equalizer::Zf, Equalizer::Mmse}) {
      opts.equalizer = eq;
      Rng rng = make_stream(49, 0);
      const auto est = info_outage_periodic(p, dep, 2.0, 40000, rng, opts);
      CHECK(std::abs(est.value - analytic) <= 2.0 * oracle::binomial_half_width(analytic, 40000));
    }
  }
  SECTION("monotone in rate, noise and transmit power at fixed seeds") {
    for (auto eq : {Equalizer::Zf, Equalizer::Mmse}) {
      opts.equalizer = eq;
      auto run = [&](const SystemParams& q) {
        Rng rng = make_stream(50, 0);
        return info_outage_periodic(q, dep, 0.4, 3000, rng, opts).value;
      };
      double prev = -1.0;
      for (double kbits : {1e-4, 1e-3, 3e-3, 1e-2}) {
        SystemParams q = p;
        q.spectral_msg = kbits;
        const double v = run(q);
        CHECK(v >= prev);
        prev = v;
      }
      prev = -1.0;
      for (double noise : {1e-8, 3e-8, 1e-7, 3e-7}) {
        SystemParams q = p;
        q.noise_power = noise;
        const double v = run(q);
        CHECK(v >= prev);
        prev = v;
      }
      prev = 2.0;
      for (double tx : {50e-6, 100e-6, 200e-6, 400e-6}) {
        SystemParams q = p;
        q.tx_power = tx;
        const double v = run(q);
        CHECK(v <= prev);
        prev = v;
      }
    }
  }
  SECTION("MMSE never loses to ZF at equal seeds") {
    auto run = [&](Equalizer eq) {
      opts.equalizer = eq;
      Rng rng = make_stream(51, 0);
      return info_outage_periodic(p, dep, 0.4, 5000, rng, opts).value;
    };
    CHECK(run(Equalizer::Mmse) <= run(Equalizer::Zf));
  }
  SECTION("perfect cancellation is bit-exact") {
    auto run = [&](const SelfInterference& si) {
      opts.self_interference = si;
      Rng rng = make_stream(52, 0);
      return info_outage_periodic(p, dep, 0.4, 3000, rng, opts);
    };
    const auto base = run({});
    const auto same = run({std::numeric_limits<double>::infinity(), 25.0});
    CHECK(base.value == same.value);
    CHECK(base.events == same.events);
    CHECK(run({120.0, 0.0}).value >= base.value);
  }
  SECTION("imperfect CSI only hurts") {
    auto run = [&](bool imperfect) {
      opts.imperfect_csi = imperfect;
      opts.csi_ul = 1e-6 * p.pilot_symbol_time * 1e-7;
      Rng rng = make_stream(53, 0);
      return info_outage_periodic(p, dep, 0.4, 5000, rng, opts).value;
    };
    CHECK(run(true) >= run(false));
  }
}

TEST_CASE("Poisson information outage", "[wit]") {
  const Deployment dep = reference_deployment();
  SystemParams p = SystemParams::defaults();
  const DiscreteExp traffic(0.25);
  const PilotPlan plan = optimal_pilot_count(100, 0.1, traffic, p.slot_time, p.coherence_time);
  REQUIRE(plan.num_sequences == 6);

  SECTION("composition with the collision term") {
    Rng rng = make_stream(54, 0);
    const auto est = info_outage_poisson(p, dep, traffic, plan, 5000, rng);
    CHECK(est.collision == plan.collision);
    CHECK_THAT(est.value, WithinAbs(est.collision + (1.0 - est.collision) * est.decoding.value, 1e-15));
    Rng rng2 = make_stream(54, 0);
    const auto approx = info_outage_poisson(p, dep, traffic, plan, 5000, rng2, {}, true);
    CHECK(approx.collision == 0.1);
    CHECK(approx.decoding.events == est.decoding.events);
  }
  SECTION("one pilot per device removes collisions") {
    PilotPlan full = plan;
    full.num_sequences = 100;
    full.collision = 0.0;
    Rng rng = make_stream(55, 0);
    const auto est = info_outage_poisson(p, dep, traffic, full, 2000, rng, {}, true);
    CHECK(est.collision == 0.0);
    CHECK(est.value == est.decoding.value);
  }
  SECTION("vanishing traffic leaves a single stream") {
    SystemParams q = p;
    q.noise_power = 1e-7;
    const DiscreteExp idle(1e-9);
    const PilotPlan idle_plan = optimal_pilot_count(100, 0.1, idle, q.slot_time, q.coherence_time);
    const double snr = q.tx_power * dep.worst_gain() / q.noise_power;
    const double m_r = q.antennas_rx();
    const double y = 2.0 * (1.0 + q.rician_k) * q.sinr_threshold() / snr;
    const double single = oracle::boost_ncx2_cdf(2.0 * m_r, 2.0 * m_r * q.rician_k, y);
    Rng rng = make_stream(56, 0);
    const auto est = info_outage_poisson(q, dep, idle, idle_plan, 40000, rng);
    CHECK(std::abs(est.decoding.value - single) <= 2.0 * oracle::binomial_half_width(single, 40000));
    CHECK(est.collision < 1e-6);
  }
  SECTION("MMSE never loses to ZF at equal seeds") {
    UplinkOptions opts;
    auto run = [&](Equalizer eq) {
      opts.equalizer = eq;
      Rng rng = make_stream(57, 0);
      return info_outage_poisson(p, dep, traffic, plan, 20000, rng, opts).value;
    };
    CHECK(run(Equalizer::Mmse) <= run(Equalizer::Zf));
  }
  SECTION("plan must fit the deployment") {
    PilotPlan bad = plan;
    bad.num_sequences = 101;
    Rng rng = make_stream(58, 0);
    CHECK_THROWS_AS(info_outage_poisson(p, dep, traffic, bad, 10, rng), DomainError);
  }
}

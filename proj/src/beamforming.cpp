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

#include "wpcn/error.hpp"
#include "wpcn/wet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace wpcn {

namespace {

// The problem in normalized units: maximize min_i a_i(W), a_i = c_i g_i^H W g_i,
// with g_i = conj(h_i) and the c_i scaled so that max_i c_i ||g_i||^2 = 1.
struct Problem {
  std::vector<CVector> g;
  std::vector<double> c;
  long dim = 0;
  double scale = 1.0;

  double value(std::size_t i, const CMatrix& w) const { return c[i] * (g[i].adjoint() * w * g[i])(0, 0).real(); }

  double rank_one_value(std::size_t i, const CVector& v) const { return c[i] * std::norm(g[i].dot(v)); }
};

Eigen::VectorXd all_values(const Problem& p, const CMatrix& w) {
  Eigen::VectorXd a(static_cast<long>(p.g.size()));
  for (std::size_t i = 0; i < p.g.size(); ++i) a(static_cast<long>(i)) = p.value(i, w);
  return a;
}

// Optimal mixed strategies of the matrix game max_theta min_i (A^T theta)_i with
// nonnegative payoffs A (atoms x devices). Solved as the LP
//   max 1^T y  s.t.  A y <= 1, y >= 0,
// whose value is 1/v; y v are the device weights and the slack duals times v
// are the atom weights. Dense tableau simplex, Dantzig pricing with a switch
// to Bland's rule after a run of degenerate pivots.
struct GameSolution {
  double value = 0.0;
  Eigen::VectorXd atom_weights;
  Eigen::VectorXd device_weights;
};

GameSolution solve_game(const Eigen::MatrixXd& a) {
  const long k = a.rows();
  const long s = a.cols();
  const long cols = s + k;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, cols + 1);
  t.topLeftCorner(k, s) = a;
  t.block(0, s, k, k).setIdentity();
  t.col(cols).head(k).setOnes();
  t.row(k).head(s).setConstant(-1.0);
  std::vector<long> basis(static_cast<std::size_t>(k));
  for (long r = 0; r < k; ++r) basis[static_cast<std::size_t>(r)] = s + r;

  constexpr double eps = 1e-12;
  bool bland = false;
  long degenerate_run = 0;
  const long max_pivots = 50 * (cols + 10);
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw IterationLimitError("matrix game simplex did not terminate");
    long enter = -1;
    double best = -eps;
    for (long j = 0; j < cols; ++j) {
      if (t(k, j) < best) {
        enter = j;
        if (bland) break;
        best = t(k, j);
      }
    }
    if (enter < 0) break;
    long leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (long r = 0; r < k; ++r) {
      const double e = t(r, enter);
      if (e <= eps) continue;
      const double q = t(r, cols) / e;
      if (q < ratio || (q == ratio && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
        ratio = q;
        leave = r;
      }
    }
    // Every device is covered by some atom, so the LP is bounded.
    if (leave < 0) throw IterationLimitError("matrix game simplex found an unbounded ray");
    degenerate_run = ratio <= eps ? degenerate_run + 1 : 0;
    if (degenerate_run > cols) bland = true;
    t.row(leave) /= t(leave, enter);
    for (long r = 0; r <= k; ++r) {
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  GameSolution out;
  out.value = 1.0 / t(k, cols);
  out.device_weights = Eigen::VectorXd::Zero(s);
  for (long r = 0; r < k; ++r) {
    const long j = basis[static_cast<std::size_t>(r)];
    if (j < s) out.device_weights(j) = std::max(0.0, t(r, cols));
  }
  out.atom_weights = t.row(k).segment(s, k).transpose().cwiseMax(0.0);
  out.device_weights /= out.device_weights.sum();
  out.atom_weights /= out.atom_weights.sum();
  return out;
}

Precoder finalize(const CMatrix& w, std::span<const CVector> channels, std::span<const double> gains,
                  double hap_power) {
  Precoder out = Precoder::from_gram(w / w.trace().real());
  out.objective = min_incident_power(out.gram, channels, gains, hap_power);
  return out;
}

}  // namespace

BeamformingReport solve_fair_beamforming_report(std::span<const CVector> channels_dl, std::span<const double> gains,
                                                double hap_power, double tol, long max_iter) {
  detail::require(!channels_dl.empty(), "beamforming needs at least one device");
  detail::require(channels_dl.size() == gains.size(), "channels and gains must pair up");
  detail::require_positive(hap_power, "hap_power");
  detail::require(tol > 0.0 && std::isfinite(tol), "tolerance must be positive");
  detail::require(max_iter >= 1, "max_iter must be positive");

  Problem p;
  p.dim = channels_dl.front().size();
  detail::require(p.dim >= 1, "channels must have at least one antenna");
  double cmax = 0.0;
  double cmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < channels_dl.size(); ++i) {
    detail::require(channels_dl[i].size() == p.dim, "all channels must have the same dimension");
    detail::require(channels_dl[i].allFinite(), "channels must be finite");
    detail::require_positive(gains[i], "channel gain");
    p.g.push_back(channels_dl[i].conjugate());
    p.c.push_back(hap_power * gains[i]);
    cmax = std::max(cmax, p.c.back() * p.g.back().squaredNorm());
    cmin = std::min(cmin, p.c.back() * p.g.back().squaredNorm());
  }
  const long n = p.dim;
  const CMatrix isotropic = CMatrix::Identity(n, n) / static_cast<double>(n);
  if (cmin == 0.0) {
    // A device with a zero channel receives nothing from any W, so the optimum
    // is 0 and every feasible point attains it.
    BeamformingReport r{finalize(isotropic, channels_dl, gains, hap_power), 0.0, 0.0, 0};
    return r;
  }
  p.scale = cmax;
  for (double& c : p.c) c /= cmax;

  // Fully corrective Frank-Wolfe. The atoms are rank-one points v v^H of the
  // spectrahedron; each round re-optimizes the weights over all atoms exactly
  // (a matrix game), then adds the leading eigenvector of sum_i pi_i c_i H_i
  // for the game's device weights pi. That eigenvalue bounds the optimum from
  // above, so the loop stops on a certified relative gap.
  std::vector<CVector> atoms;
  for (long j = 0; j < n; ++j) atoms.push_back(CVector::Unit(n, j));
  std::size_t weakest = 0;
  for (std::size_t i = 1; i < p.g.size(); ++i) {
    if (gains[i] < gains[weakest]) weakest = i;
  }
  atoms.push_back(p.g[weakest].normalized());

  const long s = static_cast<long>(p.g.size());
  Eigen::MatrixXd payoff(static_cast<long>(atoms.size()), s);
  auto fill_row = [&](long r, const CVector& v) {
    for (long i = 0; i < s; ++i) payoff(r, i) = p.rank_one_value(static_cast<std::size_t>(i), v);
  };
  for (long r = 0; r < payoff.rows(); ++r) fill_row(r, atoms[static_cast<std::size_t>(r)]);

  CMatrix best_w = isotropic;
  double best_lb = all_values(p, isotropic).minCoeff();
  double best_ub = std::numeric_limits<double>::infinity();
  // Atoms with zero weight are dropped once the pool exceeds this size; the
  // coordinate atoms stay so every device remains covered.
  const long pool_cap = n * n + n + 8;

  for (long iter = 1; iter <= max_iter; ++iter) {
    const GameSolution game = solve_game(payoff);
    CMatrix w = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double theta = game.atom_weights(static_cast<long>(k));
      if (theta > 0.0) w.noalias() += theta * (atoms[k] * atoms[k].adjoint());
    }
    w = 0.5 * (w + w.adjoint());
    w /= w.trace().real();
    const double lb = all_values(p, w).minCoeff();
    if (lb > best_lb) {
      best_lb = lb;
      best_w = w;
    }

    CMatrix dual = CMatrix::Zero(n, n);
    for (long i = 0; i < s; ++i) {
      const double weight = game.device_weights(i) * p.c[static_cast<std::size_t>(i)];
      if (weight > 0.0) dual.noalias() += weight * (p.g[static_cast<std::size_t>(i)] * p.g[static_cast<std::size_t>(i)].adjoint());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(dual);
    // lambda_max(sum pi_i c_i H_i) bounds the optimum for any pi in the simplex.
    best_ub = std::min(best_ub, eig.eigenvalues()(n - 1));
    if (best_ub - best_lb <= tol * best_lb) {
      Precoder pre = finalize(best_w, channels_dl, gains, hap_power);
      const double ub = std::max(best_ub * p.scale, *pre.objective);
      return BeamformingReport{pre, ub, ub - *pre.objective, iter};
    }

    if (static_cast<long>(atoms.size()) >= pool_cap) {
      std::vector<CVector> kept(atoms.begin(), atoms.begin() + n);
      for (std::size_t k = static_cast<std::size_t>(n); k < atoms.size(); ++k) {
        if (game.atom_weights(static_cast<long>(k)) > 0.0) kept.push_back(atoms[k]);
      }
      atoms = std::move(kept);
      payoff.resize(static_cast<long>(atoms.size()), s);
      for (long r = 0; r < payoff.rows(); ++r) fill_row(r, atoms[static_cast<std::size_t>(r)]);
    }
    atoms.push_back(eig.eigenvectors().col(n - 1));
    payoff.conservativeResize(payoff.rows() + 1, Eigen::NoChange);
    fill_row(payoff.rows() - 1, atoms.back());
  }

  Precoder pre = finalize(best_w, channels_dl, gains, hap_power);
  const double gap = best_ub * p.scale - *pre.objective;
  throw ConvergenceError("beamforming did not reach relative gap " + std::to_string(tol) + " within " +
                             std::to_string(max_iter) + " iterations",
                         std::move(pre), gap);
}

Precoder solve_fair_beamforming(std::span<const CVector> channels_dl, std::span<const double> gains, double hap_power,
                                double tol, long max_iter) {
  return solve_fair_beamforming_report(channels_dl, gains, hap_power, tol, max_iter).precoder;
}

}  // namespace wpcn

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "array_response.hpp"
#include "channel.hpp"
#include "random.hpp"
#include "types.hpp"

namespace mmcell {

// Strongest-AoA cosines used to point the beams of one cell: bs_cos[i] at the
// BS (column i of F_RF), user_cos[i] at user i.
struct CellPointing {
  std::vector<double> bs_cos;
  std::vector<double> user_cos;
};

class BeamformerBank {
 public:
  BeamformerBank(int bs_antennas, int user_antennas, std::vector<CellPointing> cells)
      : bs_antennas_(bs_antennas), user_antennas_(user_antennas), cells_(std::move(cells)) {
    if (bs_antennas < 1 || user_antennas < 1) throw std::invalid_argument("BeamformerBank: empty array");
    for (const auto& c : cells_)
      if (c.bs_cos.size() != c.user_cos.size()) throw std::invalid_argument("BeamformerBank: ragged pointing");
  }

  int bs_antennas() const { return bs_antennas_; }
  int user_antennas() const { return user_antennas_; }
  int cells() const { return static_cast<int>(cells_.size()); }
  int users() const { return cells_.empty() ? 0 : static_cast<int>(cells_.front().bs_cos.size()); }
  const CellPointing& pointing(int cell) const { return cells_.at(cell); }

  // F_RF of a cell: column i is conj(a_M(θ_i))/√M.
  CMatrix rf_matrix(int cell) const {
    const auto& p = cells_.at(cell);
    CMatrix f(bs_antennas_, static_cast<Eigen::Index>(p.bs_cos.size()));
    for (std::size_t i = 0; i < p.bs_cos.size(); ++i)
      f.col(static_cast<Eigen::Index>(i)) = steering_vector(bs_antennas_, p.bs_cos[i]).conjugate() / std::sqrt(bs_antennas_);
    return f;
  }

  // ŵ of a user: conj(a_P(φ))/√P.
  CVector user_beam(int cell, int user) const {
    return steering_vector(user_antennas_, cells_.at(cell).user_cos.at(user)).conjugate() / std::sqrt(user_antennas_);
  }

 private:
  int bs_antennas_;
  int user_antennas_;
  std::vector<CellPointing> cells_;
};

inline std::vector<CellPointing> strongest_pointing(const ChannelSet& set) {
  std::vector<CellPointing> out(set.cells());
  for (int c = 0; c < set.cells(); ++c)
    for (int i = 0; i < set.users(); ++i) {
      const Ray& r = set.link(c, c, i).strongest();
      out[c].bs_cos.push_back(r.cos_bs);
      out[c].user_cos.push_back(r.cos_user);
    }
  return out;
}

// Additive Gaussian error on every pointing cosine, clamped to [-1, 1].
inline std::vector<CellPointing> perturb_pointing(std::vector<CellPointing> pointing, double std_dev,
                                                  RandomStream& rng) {
  if (std_dev <= 0.0) return pointing;
  for (auto& cell : pointing) {
    for (double& c : cell.bs_cos) c = std::clamp(c + std_dev * rng.normal(), -1.0, 1.0);
    for (double& c : cell.user_cos) c = std::clamp(c + std_dev * rng.normal(), -1.0, 1.0);
  }
  return pointing;
}

inline BeamformerBank build_bank(std::vector<CellPointing> pointing, int bs_antennas, int user_antennas) {
  return BeamformerBank(bs_antennas, user_antennas, std::move(pointing));
}

inline BeamformerBank build_bank(const ChannelSet& set) {
  return build_bank(strongest_pointing(set), set.bs_antennas(), set.user_antennas());
}

// G_n[x] = sin²(nπx/2) / (n sin²(πx/2)), limit n on 2ℤ.
inline double array_gain(int n, double x) {
  if (n < 1) throw std::invalid_argument("array_gain: n must be >= 1");
  const double r = wrap_period2(x);
  const double den = std::sin(kPi * r / 2.0);
  if (den == 0.0) return n;
  const double num = std::sin(n * kPi * r / 2.0);
  return std::min<double>(n, num * num / (n * den * den));
}

// (1/2)∫_{-1}^{1} G_n[x] dx by the periodic trapezoid rule. G_n is a
// trigonometric polynomial of degree n-1 in πx, so any resolution >= n is
// exact up to rounding.
inline double mean_array_gain(int n, int resolution) {
  if (n < 1) throw std::invalid_argument("mean_array_gain: n must be >= 1");
  if (resolution < 1) throw std::invalid_argument("mean_array_gain: resolution must be >= 1");
  double sum = 0.0;
  for (int k = 0; k < resolution; ++k) sum += array_gain(n, -1.0 + 2.0 * k / resolution);
  const double mean = sum / resolution;
  if (!std::isfinite(mean)) throw std::runtime_error("mean_array_gain: quadrature produced a non-finite value");
  return mean;
}

inline double mean_array_gain(int n) { return mean_array_gain(n, 2 * n + 1); }

// (1/√M) h^T F_RF for a single-antenna user channel h.
inline CRowVector project_channel(const CVector& h, const CMatrix& rf) {
  if (h.size() != rf.rows()) throw std::invalid_argument("project_channel: dimension mismatch");
  return (h.transpose() * rf) / std::sqrt(static_cast<double>(h.size()));
}

// ŵ^H H^T F_RF for a clustered channel, user beam pointed at user_cos and BS
// beams at bs_cos. Evaluated ray by ray with Dirichlet kernels instead of
// forming the M×P matrix.
inline CRowVector project_link(const RayChannel& ch, double user_cos, const std::vector<double>& bs_cos) {
  const int m = ch.bs_antennas();
  const int p = ch.user_antennas();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m) * p);
  CRowVector row = CRowVector::Zero(static_cast<Eigen::Index>(bs_cos.size()));
  for (const Ray& r : ch.rays()) {
    if (r.gain == cd{}) continue;
    const cd user_term = r.gain * dirichlet_sum(p, r.cos_user - user_cos) * norm;
    for (std::size_t j = 0; j < bs_cos.size(); ++j)
      row(static_cast<Eigen::Index>(j)) += user_term * dirichlet_sum(m, bs_cos[j] - r.cos_bs);
  }
  return row;
}

// H ŵ^*: the M-dimensional channel seen by a fully-digital BS when the user
// transmits through its beam.
inline CVector effective_uplink(const RayChannel& ch, double user_cos) {
  const int m = ch.bs_antennas();
  const int p = ch.user_antennas();
  CVector g = CVector::Zero(m);
  for (const Ray& r : ch.rays()) {
    if (r.gain == cd{}) continue;
    const cd coef = r.gain * dirichlet_sum(p, r.cos_user - user_cos) / std::sqrt(static_cast<double>(p));
    const cd step = std::polar(1.0, -kPi * r.cos_bs);
    cd phasor = coef;
    for (int k = 0; k < m; ++k) {
      g(k) += phasor;
      phasor *= step;
    }
  }
  return g;
}

}  // namespace mmcell

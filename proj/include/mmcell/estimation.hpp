// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamforming.hpp"
#include "channel.hpp"
#include "random.hpp"
#include "types.hpp"

namespace mmcell {

// Orthonormal pilot sequences: column i of phi is user i's pilot over N slots.
struct PilotBook {
  CMatrix phi;
  int size() const { return static_cast<int>(phi.cols()); }
};

inline PilotBook build_pilots(int n) {
  if (n < 1) throw std::invalid_argument("build_pilots: need at least one pilot");
  PilotBook book;
  book.phi.resize(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) book.phi(m, i) = std::polar(norm, -2.0 * kPi * m * i / n);
  return book;
}

// Equivalent-channel rows seen by the RF chains of one BS during the pilot
// phase. Row i belongs to pilot i, column j to RF chain j.
struct UplinkProjections {
  CMatrix own;                          // this cell's users
  CMatrix contamination;                // sum over every other cell
  std::vector<CMatrix> per_cell;        // per_cell[d]: part from cell d (zero for d = bs)
};

inline UplinkProjections project_uplink(const ChannelSet& set, const BeamformerBank& bank, int bs) {
  const int n = set.users();
  const auto& bs_cos = bank.pointing(bs).bs_cos;
  UplinkProjections out;
  out.own = CMatrix::Zero(n, static_cast<Eigen::Index>(bs_cos.size()));
  out.contamination = CMatrix::Zero(n, out.own.cols());
  out.per_cell.assign(set.cells(), CMatrix::Zero(n, out.own.cols()));
  for (int d = 0; d < set.cells(); ++d)
    for (int i = 0; i < n; ++i)
      out.per_cell[d].row(i) = project_link(set.link(bs, d, i), bank.pointing(d).user_cos[i], bs_cos);
  out.own = out.per_cell[bs];
  out.per_cell[bs].setZero();
  for (int d = 0; d < set.cells(); ++d) out.contamination += out.per_cell[d];
  return out;
}

// F^T Z for Z with i.i.d. CN(0, variance) entries on every antenna and slot.
inline CMatrix rf_chain_noise(const CMatrix& rf, int slots, double variance, RandomStream& rng) {
  if (variance == 0.0) return CMatrix::Zero(rf.cols(), slots);
  const CMatrix z = rng.complex_normal_matrix(rf.rows(), slots, variance);
  return rf.transpose() * z;
}

// Received pilot block at the RF chains, one row per chain:
//   S = √E_P (own + contamination)^T Φ^T + F^T Z.
inline CMatrix receive_block(const CMatrix& own, const CMatrix& contamination, const PilotBook& pilots,
                             double pilot_energy, const CMatrix& chain_noise) {
  if (own.rows() != pilots.size() || contamination.rows() != own.rows() || contamination.cols() != own.cols())
    throw std::invalid_argument("receive_block: dimension mismatch");
  if (chain_noise.rows() != own.cols() || chain_noise.cols() != pilots.phi.rows())
    throw std::invalid_argument("receive_block: noise block has the wrong shape");
  return std::sqrt(pilot_energy) * (own + contamination).transpose() * pilots.phi.transpose() + chain_noise;
}

inline CMatrix uplink_receive(const ChannelSet& set, const BeamformerBank& bank, int bs, const PilotBook& pilots,
                              double pilot_energy, double noise_variance, RandomStream& rng) {
  const UplinkProjections proj = project_uplink(set, bank, bs);
  const CMatrix noise = rf_chain_noise(bank.rf_matrix(bs), pilots.size(), noise_variance, rng);
  return receive_block(proj.own, proj.contamination, pilots, pilot_energy, noise);
}

struct EquivalentChannelEstimate {
  CMatrix h_eq_true;   // rows ŵ_k^H H_k^T F_RF
  CMatrix h_eq_hat;    // B (h_eq_true + delta)
  CMatrix delta;       // contamination + effective noise
  RVector compensation;

  // Estimation error in units of the compensated channel, B·delta.
  CMatrix scaled_error() const { return h_eq_hat - compensation.asDiagonal() * h_eq_true; }

  double reconstruction_error() const {
    return (h_eq_hat - compensation.asDiagonal() * (h_eq_true + delta)).cwiseAbs().maxCoeff();
  }
};

inline RVector path_loss_compensation(const std::vector<double>& path_gains) {
  RVector b(static_cast<Eigen::Index>(path_gains.size()));
  for (std::size_t k = 0; k < path_gains.size(); ++k) b(static_cast<Eigen::Index>(k)) = 1.0 / std::sqrt(path_gains[k]);
  return b;
}

inline EquivalentChannelEstimate estimate_equivalent(const CMatrix& received, const PilotBook& pilots,
                                                     double pilot_energy, const RVector& compensation,
                                                     const CMatrix& h_eq_true) {
  for (Eigen::Index k = 0; k < compensation.size(); ++k)
    if (!(compensation(k) > 0.0) || !std::isfinite(compensation(k)))
      throw std::invalid_argument("estimate_equivalent: compensation matrix must be positive diagonal");
  if (!(pilot_energy > 0.0)) throw std::invalid_argument("estimate_equivalent: pilot energy must be positive");
  if (compensation.size() != pilots.size() || received.cols() != pilots.phi.rows())
    throw std::invalid_argument("estimate_equivalent: dimension mismatch");
  EquivalentChannelEstimate est;
  est.h_eq_true = h_eq_true;
  est.compensation = compensation;
  const CMatrix raw = (received * pilots.phi.conjugate()).transpose() / std::sqrt(pilot_energy);
  est.h_eq_hat = compensation.asDiagonal() * raw;
  est.delta = raw - h_eq_true;
  return est;
}

inline double row_error_energy(const EquivalentChannelEstimate& est, int k) {
  return est.scaled_error().row(k).squaredNorm();
}

// Per-RF-chain empirical NMSE, error energy normalised by N·M·P.
inline RVector empirical_nmse(const std::vector<EquivalentChannelEstimate>& estimates, int bs_antennas,
                              int user_antennas) {
  if (estimates.empty()) throw std::invalid_argument("empirical_nmse: need at least one trial");
  const Eigen::Index n = estimates.front().h_eq_hat.rows();
  RVector acc = RVector::Zero(n);
  for (const auto& e : estimates) acc += e.scaled_error().rowwise().squaredNorm();
  return acc / (static_cast<double>(estimates.size()) * n * bs_antennas * user_antennas);
}

inline double analytical_nmse(const std::vector<double>& rho_sq, double path_gain, double pilot_energy,
                              double noise_variance, int bs_antennas, int user_antennas) {
  if (bs_antennas < 1 || user_antennas < 1) throw std::invalid_argument("analytical_nmse: M, P must be >= 1");
  double xi = 0.0;
  for (double r : rho_sq) xi += r;
  const double mp = static_cast<double>(bs_antennas) * user_antennas;
  return xi / mp + noise_variance / (path_gain * pilot_energy * mp);
}

// Fully-digital least-squares estimate of the beamformed user channels
// g_i = H_i ŵ_i^* (columns of an M×N matrix).
struct LsEstimate {
  CMatrix g_true;
  CMatrix g_hat;

  double error_energy() const { return (g_hat - g_true).squaredNorm(); }
  double channel_energy() const { return g_true.squaredNorm(); }
};

inline LsEstimate ls_estimate_fully_digital(const CMatrix& g_true, const CMatrix& contamination,
                                            const PilotBook& pilots, double pilot_energy, double noise_variance,
                                            RandomStream& rng) {
  if (g_true.cols() != pilots.size() || contamination.rows() != g_true.rows() ||
      contamination.cols() != g_true.cols())
    throw std::invalid_argument("ls_estimate_fully_digital: dimension mismatch");
  const double sp = std::sqrt(pilot_energy);
  CMatrix y = sp * (g_true + contamination) * pilots.phi.transpose();
  if (noise_variance > 0.0) y += rng.complex_normal_matrix(y.rows(), y.cols(), noise_variance);
  return {g_true, y * pilots.phi.conjugate() / sp};
}

inline double ls_nmse(const std::vector<LsEstimate>& estimates) {
  double err = 0.0;
  double ref = 0.0;
  for (const auto& e : estimates) {
    err += e.error_energy();
    ref += e.channel_energy();
  }
  return err / ref;
}

}  // namespace mmcell

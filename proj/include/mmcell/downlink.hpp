// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "channel.hpp"
#include "types.hpp"

namespace mmcell {

inline constexpr double kMaxConditionNumber = 1.0e8;
// Reported instead of +inf when a closed form has no interference and no noise.
inline constexpr double kRateSentinel = 1.0e3;

struct ZfPrecoder {
  CMatrix w;
  double beta = 0.0;
  double condition = 0.0;
};

inline double condition_number(const CMatrix& a) {
  const Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

// ZF on channel rows R (users × transmit dimensions): W = R^{-1} when square,
// the right pseudo-inverse R^H (R R^H)^{-1} otherwise. Returns nothing when R
// is too ill-conditioned to invert faithfully.
inline std::optional<ZfPrecoder> zf_precoder(const CMatrix& rows, double max_condition = kMaxConditionNumber) {
  if (rows.rows() > rows.cols()) throw std::invalid_argument("zf_precoder: more users than transmit dimensions");
  ZfPrecoder zf;
  zf.condition = condition_number(rows);
  if (!(zf.condition <= max_condition)) return std::nullopt;
  if (rows.rows() == rows.cols())
    zf.w = rows.partialPivLu().inverse();
  else
    zf.w = rows.adjoint() * (rows * rows.adjoint()).partialPivLu().inverse();
  zf.beta = 1.0 / zf.w.norm();
  if (!std::isfinite(zf.beta)) return std::nullopt;
  return zf;
}

// Received powers per unit symbol energy.
struct SinrTerms {
  double desired = 0.0;
  double intra = 0.0;
  double inter = 0.0;

  double sinr(double symbol_energy, double noise) const {
    const double den = symbol_energy * (intra + inter) + noise;
    if (symbol_energy == 0.0 || desired == 0.0) return 0.0;
    return symbol_energy * desired / den;
  }
  double rate(double symbol_energy, double noise) const { return std::log2(1.0 + sinr(symbol_energy, noise)); }
};

// true_rows: row k is the desired cell's true channel of user k seen through
// its own transmit chains. leak_rows[l]: row k is user k's channel from
// neighbour l's transmit chains, paired with that neighbour's precoder.
inline std::vector<SinrTerms> downlink_sinr(const CMatrix& true_rows, const ZfPrecoder& own,
                                            const std::vector<CMatrix>& leak_rows,
                                            const std::vector<ZfPrecoder>& neighbors) {
  if (leak_rows.size() != neighbors.size()) throw std::invalid_argument("downlink_sinr: neighbour count mismatch");
  const CMatrix eff = own.beta * (true_rows * own.w);
  std::vector<SinrTerms> out(static_cast<std::size_t>(true_rows.rows()));
  for (Eigen::Index k = 0; k < eff.rows(); ++k) {
    SinrTerms& t = out[static_cast<std::size_t>(k)];
    t.desired = std::norm(eff(k, k));
    t.intra = eff.row(k).squaredNorm() - t.desired;
    if (t.intra < 0.0) t.intra = 0.0;
  }
  for (std::size_t l = 0; l < neighbors.size(); ++l) {
    const CMatrix leak = neighbors[l].beta * (leak_rows[l] * neighbors[l].w);
    for (Eigen::Index k = 0; k < leak.rows(); ++k) out[static_cast<std::size_t>(k)].inter += leak.row(k).squaredNorm();
  }
  return out;
}

inline double average_rate(const std::vector<SinrTerms>& users, double symbol_energy, double noise) {
  double s = 0.0;
  for (const auto& u : users) s += u.rate(symbol_energy, noise);
  return users.empty() ? 0.0 : s / static_cast<double>(users.size());
}

namespace detail {
inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}
inline double los_weight_inverse(double varsigma) { return 1.0 / strongest_fraction(varsigma); }
}  // namespace detail

inline double beta_bar(double varsigma, int bs_antennas, int user_antennas, int users) {
  return std::sqrt(strongest_fraction(varsigma) * bs_antennas * user_antennas / users);
}

inline double lemma1_intra(const std::vector<double>& rho_sq, double varsigma, int bs_antennas, int user_antennas,
                           int users, double beta_bar_value, double path_gain, double symbol_energy) {
  const double mp = static_cast<double>(bs_antennas) * user_antennas;
  const double xi = detail::sum(rho_sq);
  const double x = xi / mp;
  const double root = std::sqrt(1.0 + x) - 1.0;
  const double bracket = root * root + (1.0 + x) * (xi * users / mp) * detail::los_weight_inverse(varsigma);
  return beta_bar_value * beta_bar_value * path_gain * symbol_energy * bracket;
}

inline double lemma2_inter(const std::vector<double>& leak_gains, double symbol_energy) {
  return symbol_energy * detail::sum(leak_gains);
}

inline double theorem2_rate(const std::vector<double>& rho_sq, const std::vector<double>& zeta_sq, double varsigma,
                            int bs_antennas, int user_antennas, int users, double beta_bar_value, double path_gain,
                            double symbol_energy, double noise) {
  const double mp = static_cast<double>(bs_antennas) * user_antennas;
  const double xi = detail::sum(rho_sq);
  const double zeta = detail::sum(zeta_sq);
  const double spread = users * detail::los_weight_inverse(varsigma) / mp;
  const double root = std::sqrt(1.0 + xi / mp) - 1.0;
  const double a = root * root;
  const double b = (1.0 + xi / mp) * spread * xi;
  const double c = spread * zeta + noise / (beta_bar_value * beta_bar_value * path_gain * symbol_energy);
  const double total = a + b + c;
  if (!(total > 0.0)) return kRateSentinel;
  return std::min(kRateSentinel, std::log2(1.0 + 1.0 / total));
}

// Single-cell, interference-free rate. The receive SNR is ϖ·E_s/σ²; with the
// default unit path gain E_s is taken as already including it.
inline double upper_bound_rate(int bs_antennas, int user_antennas, int users, double varsigma, double symbol_energy,
                               double noise, double path_gain = 1.0) {
  const double los = strongest_fraction(varsigma);
  const double gain = static_cast<double>(bs_antennas) * user_antennas / users * los + (1.0 - los);
  if (noise == 0.0) return symbol_energy > 0.0 ? kRateSentinel : 0.0;
  return std::min(kRateSentinel, std::log2(1.0 + gain * path_gain * symbol_energy / noise));
}

inline std::vector<double> scaling_ratio(const std::vector<double>& rates, const std::vector<int>& bs_antennas) {
  if (rates.size() != bs_antennas.size()) throw std::invalid_argument("scaling_ratio: size mismatch");
  if (rates.size() < 3) throw std::invalid_argument("scaling_ratio: need at least three sweep points");
  std::vector<double> out;
  out.reserve(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) out.push_back(rates[i] / std::log2(static_cast<double>(bs_antennas[i])));
  return out;
}

}  // namespace mmcell

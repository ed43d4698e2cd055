// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"
#include "types.hpp"

namespace mmcell {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct PathLossModel {
  double alpha_pl = 1.9;
  double varrho_pl = 20.0;
  double carrier_hz = 28.0e9;
};

// Linear-scale large-scale gain of the empirical model
//   PL[dB] = 10·α·log10(d) + ϱ·log10(4π f_c / c).
inline double path_loss(double distance_m, const PathLossModel& model) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  const double loss_db = 10.0 * model.alpha_pl * std::log10(distance_m) +
                         model.varrho_pl * std::log10(4.0 * kPi * model.carrier_hz / kSpeedOfLight);
  return std::pow(10.0, -loss_db / 10.0);
}

inline double noise_power(double bandwidth_hz, double temperature_k) {
  if (bandwidth_hz < 0.0 || temperature_k < 0.0)
    throw std::domain_error("noise_power: bandwidth and temperature must be non-negative");
  return bandwidth_hz * kBoltzmann * temperature_k;
}

enum class ContaminationMode { explicit_xi_sq, geometric };
enum class LsErrorReference { effective, physical };

struct ScenarioConfig {
  int L = 6;
  int N = 10;
  int M = 128;
  int P = 10;
  std::optional<double> E_P;
  std::optional<double> E_s;
  double max_tx_power_dbm = 46.0;
  double bs_antenna_gain_dbi = 14.0;
  double varsigma_intra = 4.0;
  double varsigma_inter_ul = 2.0;
  double varsigma_inter_dl = 2.0;
  int n_clusters = 8;
  std::optional<double> xi_sq = 0.01;
  ContaminationMode contamination_mode = ContaminationMode::explicit_xi_sq;
  double alpha_pl = 1.9;
  double varrho_pl = 20.0;
  double carrier_hz = 28.0e9;
  double bandwidth_hz = 250.0e6;
  double temperature_k = 300.0;
  double isd_m = 200.0;
  double min_distance_m = 10.0;
  // Distance at which every user's own-BS gain is pinned by power control.
  // Unset means half the inter-site distance.
  std::optional<double> ref_distance_m;
  std::optional<double> noise_bs_w;
  std::optional<double> noise_ms_w;
  double aoa_error_std = 0.0;
  LsErrorReference ls_error_reference = LsErrorReference::effective;
  int trials = 500;
  std::uint64_t seed = 1;

  int cells() const { return L + 1; }

  PathLossModel path_loss_model() const { return {alpha_pl, varrho_pl, carrier_hz}; }

  double symbol_energy() const {
    return E_s ? *E_s : dbm_to_watt(max_tx_power_dbm + bs_antenna_gain_dbi);
  }
  // Pilots share the same budget: one slot per user.
  double pilot_energy() const { return E_P ? *E_P : symbol_energy() / N; }

  double noise_bs() const { return noise_bs_w ? *noise_bs_w : noise_power(bandwidth_hz, temperature_k); }
  double noise_ms() const { return noise_ms_w ? *noise_ms_w : noise_power(bandwidth_hz, temperature_k); }

  double reference_distance() const { return ref_distance_m ? *ref_distance_m : isd_m / 2.0; }
  double reference_gain() const { return path_loss(reference_distance(), path_loss_model()); }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
    if (L < 1) fail("L must be >= 1");
    if (N < 1) fail("N must be >= 1");
    if (P < 1) fail("P must be >= 1");
    if (M < N) fail("M must be >= N");
    if (n_clusters < 1) fail("n_clusters must be >= 1");
    for (double s : {varsigma_intra, varsigma_inter_ul, varsigma_inter_dl})
      if (!(s >= 0.0)) fail("power ratios must be >= 0");
    if (E_P && !(*E_P > 0.0)) fail("E_P must be > 0");
    if (E_s && !(*E_s > 0.0)) fail("E_s must be > 0");
    if (contamination_mode == ContaminationMode::explicit_xi_sq && !(xi_sq && *xi_sq >= 0.0))
      fail("explicit_xi_sq mode needs xi_sq >= 0");
    if (!(carrier_hz > 0.0)) fail("carrier_hz must be > 0");
    if (!(bandwidth_hz >= 0.0) || !(temperature_k >= 0.0)) fail("noise parameters must be >= 0");
    if (!(isd_m > 0.0)) fail("isd_m must be > 0");
    if (!(min_distance_m >= 0.0) || !(min_distance_m < isd_m / 2.0))
      fail("min_distance_m must lie in [0, isd_m/2)");
    if (ref_distance_m && !(*ref_distance_m > 0.0)) fail("ref_distance_m must be > 0");
    if (noise_bs_w && !(*noise_bs_w >= 0.0)) fail("noise_bs_w must be >= 0");
    if (noise_ms_w && !(*noise_ms_w >= 0.0)) fail("noise_ms_w must be >= 0");
    if (!(aoa_error_std >= 0.0)) fail("aoa_error_std must be >= 0");
    if (trials < 1) fail("trials must be >= 1");
  }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Hexagon with flat faces toward the six ring neighbours (face normals at
// 0, 60 and 120 degrees), apothem = isd/2.
inline bool inside_hexagon(Point offset, double apothem) {
  for (int f = 0; f < 3; ++f) {
    const double a = f * kPi / 3.0;
    if (std::abs(offset.x * std::cos(a) + offset.y * std::sin(a)) > apothem) return false;
  }
  return true;
}

struct Deployment {
  Point desired_bs_position;
  std::vector<Point> neighbor_bs_positions;
  // user_positions[c][i]: user i of cell c, cell 0 is the desired cell.
  std::vector<std::vector<Point>> user_positions;

  int cells() const { return static_cast<int>(neighbor_bs_positions.size()) + 1; }
  Point bs(int cell) const { return cell == 0 ? desired_bs_position : neighbor_bs_positions.at(cell - 1); }
  double user_to_bs(int cell, int user, int bs_cell) const {
    return distance(user_positions.at(cell).at(user), bs(bs_cell));
  }
};

inline std::vector<Point> bs_ring(int neighbors, double isd_m) {
  std::vector<Point> ring;
  ring.reserve(neighbors);
  for (int l = 0; l < neighbors; ++l) {
    const double a = 2.0 * kPi * l / neighbors;
    ring.push_back({isd_m * std::cos(a), isd_m * std::sin(a)});
  }
  return ring;
}

inline Point sample_in_cell(double apothem, double min_distance, RandomStream& rng) {
  const double circumradius = apothem * 2.0 / std::sqrt(3.0);
  for (;;) {
    const Point p{rng.uniform(-apothem, apothem), rng.uniform(-circumradius, circumradius)};
    if (!inside_hexagon(p, apothem)) continue;
    if (std::hypot(p.x, p.y) < min_distance) continue;
    return p;
  }
}

inline Deployment drop_deployment(const ScenarioConfig& cfg, RandomStream& rng) {
  Deployment d;
  d.neighbor_bs_positions = bs_ring(cfg.L, cfg.isd_m);
  d.user_positions.resize(cfg.cells());
  const double apothem = cfg.isd_m / 2.0;
  for (int c = 0; c < cfg.cells(); ++c) {
    const Point centre = d.bs(c);
    for (int i = 0; i < cfg.N; ++i) {
      const Point p = sample_in_cell(apothem, cfg.min_distance_m, rng);
      d.user_positions[c].push_back({centre.x + p.x, centre.y + p.y});
    }
  }
  return d;
}

// Large-scale gains of every user <-> BS link, indexed (bs cell, user cell, user).
// Users run long-term power control so that their own-BS gain equals the
// common reference gain; every other link keeps its path-loss ratio to it.
class LinkGains {
 public:
  LinkGains(int cells, int users, double reference)
      : cells_(cells), users_(users), reference_(reference),
        gains_(static_cast<std::size_t>(cells) * cells * users, 0.0) {}

  double& at(int bs, int cell, int user) { return gains_[index(bs, cell, user)]; }
  double at(int bs, int cell, int user) const { return gains_[index(bs, cell, user)]; }

  int cells() const { return cells_; }
  int users() const { return users_; }
  double reference() const { return reference_; }

 private:
  std::size_t index(int bs, int cell, int user) const {
    if (bs < 0 || bs >= cells_ || cell < 0 || cell >= cells_ || user < 0 || user >= users_)
      throw std::out_of_range("LinkGains index");
    return (static_cast<std::size_t>(bs) * cells_ + cell) * users_ + user;
  }

  int cells_;
  int users_;
  double reference_;
  std::vector<double> gains_;
};

inline LinkGains explicit_link_gains(const ScenarioConfig& cfg) {
  if (!cfg.xi_sq) throw std::invalid_argument("explicit link gains need xi_sq");
  LinkGains g(cfg.cells(), cfg.N, cfg.reference_gain());
  const double cross = g.reference() * *cfg.xi_sq / cfg.L;
  for (int c = 0; c < cfg.cells(); ++c)
    for (int d = 0; d < cfg.cells(); ++d)
      for (int i = 0; i < cfg.N; ++i) g.at(c, d, i) = c == d ? g.reference() : cross;
  return g;
}

inline LinkGains geometric_link_gains(const ScenarioConfig& cfg, const Deployment& dep) {
  const PathLossModel model = cfg.path_loss_model();
  LinkGains g(cfg.cells(), cfg.N, cfg.reference_gain());
  for (int d = 0; d < cfg.cells(); ++d)
    for (int i = 0; i < cfg.N; ++i) {
      const double own = path_loss(dep.user_to_bs(d, i, d), model);
      for (int c = 0; c < cfg.cells(); ++c)
        g.at(c, d, i) = g.reference() * path_loss(dep.user_to_bs(d, i, c), model) / own;
    }
  return g;
}

// rho_sq[l-1][k]: uplink contamination of desired pilot k by cell l, relative to ϖ_k.
// zeta_sq[l-1][k]: downlink leakage BS l -> desired user k, relative to ϖ_k.
struct ContaminationCoefficients {
  std::vector<std::vector<double>> rho_sq;
  std::vector<std::vector<double>> zeta_sq;

  double xi_sq(int k) const {
    double s = 0.0;
    for (const auto& row : rho_sq) s += row.at(k);
    return s;
  }
  double zeta_sq_sum(int k) const {
    double s = 0.0;
    for (const auto& row : zeta_sq) s += row.at(k);
    return s;
  }
};

inline ContaminationCoefficients contamination_coefficients(const LinkGains& g) {
  ContaminationCoefficients out;
  const int neighbors = g.cells() - 1;
  out.rho_sq.assign(neighbors, std::vector<double>(g.users()));
  out.zeta_sq.assign(neighbors, std::vector<double>(g.users()));
  for (int l = 1; l <= neighbors; ++l)
    for (int k = 0; k < g.users(); ++k) {
      const double own = g.at(0, 0, k);
      out.rho_sq[l - 1][k] = g.at(0, l, k) / own;
      out.zeta_sq[l - 1][k] = g.at(l, 0, k) / own;
    }
  return out;
}

inline ContaminationCoefficients contamination_coefficients(const ScenarioConfig& cfg,
                                                            const Deployment* dep) {
  if (cfg.contamination_mode == ContaminationMode::explicit_xi_sq)
    return contamination_coefficients(explicit_link_gains(cfg));
  if (!dep) throw std::invalid_argument("geometric contamination needs a deployment");
  return contamination_coefficients(geometric_link_gains(cfg, *dep));
}

}  // namespace mmcell

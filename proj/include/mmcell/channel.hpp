// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "array_response.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "types.hpp"

namespace mmcell {

// One propagation path: gain · a_M(cos_bs) · a_P(cos_user)^H.
struct Ray {
  cd gain;
  double cos_bs = 0.0;
  double cos_user = 0.0;
};

// Uplink-oriented (M×P) clustered channel. The first ray is always the
// strongest-AoA path; the downlink of the same link is the transpose.
class RayChannel {
 public:
  RayChannel() = default;
  RayChannel(int bs_antennas, int user_antennas, std::vector<Ray> rays)
      : bs_antennas_(bs_antennas), user_antennas_(user_antennas), rays_(std::move(rays)) {
    if (rays_.empty()) throw std::invalid_argument("RayChannel needs at least the strongest ray");
  }

  int bs_antennas() const { return bs_antennas_; }
  int user_antennas() const { return user_antennas_; }
  const std::vector<Ray>& rays() const { return rays_; }
  const Ray& strongest() const { return rays_.front(); }

  CMatrix matrix() const {
    CMatrix h = CMatrix::Zero(bs_antennas_, user_antennas_);
    for (const Ray& r : rays_) {
      if (r.gain == cd{}) continue;
      h.noalias() += r.gain * steering_vector(bs_antennas_, r.cos_bs) *
                     steering_vector(user_antennas_, r.cos_user).adjoint();
    }
    return h;
  }

  CMatrix downlink_matrix() const { return matrix().transpose(); }

  CMatrix strongest_term() const {
    const Ray& r = strongest();
    return r.gain * steering_vector(bs_antennas_, r.cos_bs) * steering_vector(user_antennas_, r.cos_user).adjoint();
  }

  // Same geometry on a different array size (the draws do not depend on M or P).
  RayChannel resized(int bs_antennas, int user_antennas) const {
    RayChannel c = *this;
    c.bs_antennas_ = bs_antennas;
    c.user_antennas_ = user_antennas;
    return c;
  }

  RayChannel scaled(double amplitude) const {
    RayChannel c = *this;
    for (Ray& r : c.rays_) r.gain *= amplitude;
    return c;
  }

 private:
  int bs_antennas_ = 0;
  int user_antennas_ = 0;
  std::vector<Ray> rays_;
};

struct AngleSet {
  double strongest_bs = 0.0;
  double strongest_user = 0.0;
  std::vector<double> cluster_bs;
  std::vector<double> cluster_user;
};

// Cosines of all angles are drawn uniformly on [-1, 1].
inline AngleSet sample_angles(int n_clusters, RandomStream& rng) {
  AngleSet a;
  a.strongest_bs = rng.uniform(-1.0, 1.0);
  a.strongest_user = rng.uniform(-1.0, 1.0);
  a.cluster_bs.resize(n_clusters);
  a.cluster_user.resize(n_clusters);
  for (int i = 0; i < n_clusters; ++i) {
    a.cluster_bs[i] = rng.uniform(-1.0, 1.0);
    a.cluster_user[i] = rng.uniform(-1.0, 1.0);
  }
  return a;
}

inline double strongest_fraction(double varsigma) {
  return std::isinf(varsigma) ? 1.0 : varsigma / (varsigma + 1.0);
}

inline double scattered_fraction(double varsigma) {
  return std::isinf(varsigma) ? 0.0 : 1.0 / (varsigma + 1.0);
}

inline RayChannel synth_channel(int bs_antennas, int user_antennas, double path_gain, double varsigma,
                                int n_clusters, RandomStream& rng) {
  if (!(varsigma >= 0.0)) throw std::invalid_argument("synth_channel: power ratio must be >= 0");
  if (n_clusters < 1) throw std::invalid_argument("synth_channel: need at least one cluster");
  if (!(path_gain >= 0.0)) throw std::invalid_argument("synth_channel: path gain must be >= 0");
  const AngleSet angles = sample_angles(n_clusters, rng);
  std::vector<Ray> rays;
  rays.reserve(n_clusters + 1);
  rays.push_back({cd(std::sqrt(path_gain * strongest_fraction(varsigma)), 0.0), angles.strongest_bs,
                  angles.strongest_user});
  const double scatter = std::sqrt(path_gain * scattered_fraction(varsigma) / n_clusters);
  for (int i = 0; i < n_clusters; ++i) {
    const cd alpha = rng.complex_normal();
    if (scatter > 0.0) rays.push_back({scatter * alpha, angles.cluster_bs[i], angles.cluster_user[i]});
  }
  return RayChannel(bs_antennas, user_antennas, std::move(rays));
}

inline RayChannel synth_intra(const ScenarioConfig& cfg, double path_gain, RandomStream& rng) {
  return synth_channel(cfg.M, cfg.P, path_gain, cfg.varsigma_intra, cfg.n_clusters, rng);
}

inline RayChannel synth_inter_uplink(const ScenarioConfig& cfg, double path_gain, double varsigma,
                                     RandomStream& rng) {
  return synth_channel(cfg.M, cfg.P, path_gain, varsigma, cfg.n_clusters, rng);
}

// Downlink BS l -> user: use downlink_matrix() for the P×M form.
inline RayChannel synth_inter_downlink(const ScenarioConfig& cfg, double path_gain, double varsigma,
                                       RandomStream& rng) {
  return synth_channel(cfg.M, cfg.P, path_gain, varsigma, cfg.n_clusters, rng);
}

enum class ChannelScope {
  desired_bs,  // links into the desired BS plus every cell's own links
  all_bs,      // every user <-> every BS
};

// All links of one trial, indexed (bs cell, user cell, user); cell 0 is the
// desired cell. The downlink channel from neighbour BS l to desired user k
// is the reciprocal of uplink link(l, 0, k).
class ChannelSet {
 public:
  ChannelSet(int cells, int users, int bs_antennas, int user_antennas, ChannelScope scope, std::uint64_t seed)
      : cells_(cells), users_(users), bs_antennas_(bs_antennas), user_antennas_(user_antennas), scope_(scope),
        seed_(seed), links_(static_cast<std::size_t>(cells) * cells * users) {}

  int cells() const { return cells_; }
  int users() const { return users_; }
  int bs_antennas() const { return bs_antennas_; }
  int user_antennas() const { return user_antennas_; }
  ChannelScope scope() const { return scope_; }
  std::uint64_t seed() const { return seed_; }

  bool has_link(int bs, int cell, int user) const { return links_[index(bs, cell, user)].has_value(); }

  const RayChannel& link(int bs, int cell, int user) const {
    const auto& l = links_[index(bs, cell, user)];
    if (!l) throw std::out_of_range("ChannelSet: link not generated in this scope");
    return *l;
  }

  void set_link(int bs, int cell, int user, RayChannel channel) { links_[index(bs, cell, user)] = std::move(channel); }

  const RayChannel& intra(int k) const { return link(0, 0, k); }
  const RayChannel& inter_uplink(int l, int i) const { return link(0, l, i); }
  const RayChannel& inter_downlink(int l, int k) const { return link(l, 0, k); }

  static bool in_scope(ChannelScope scope, int bs, int cell) {
    return scope == ChannelScope::all_bs || bs == 0 || bs == cell;
  }

 private:
  std::size_t index(int bs, int cell, int user) const {
    if (bs < 0 || bs >= cells_ || cell < 0 || cell >= cells_ || user < 0 || user >= users_)
      throw std::out_of_range("ChannelSet index");
    return (static_cast<std::size_t>(bs) * cells_ + cell) * users_ + user;
  }

  int cells_;
  int users_;
  int bs_antennas_;
  int user_antennas_;
  ChannelScope scope_;
  std::uint64_t seed_;
  std::vector<std::optional<RayChannel>> links_;
};

inline double link_varsigma(const ScenarioConfig& cfg, int bs, int cell) {
  if (bs == cell) return cfg.varsigma_intra;
  if (cell == 0) return cfg.varsigma_inter_dl;
  return cfg.varsigma_inter_ul;
}

// Each link draws from its own stream, so the realisation of a link depends
// only on (trial seed, link index) and not on M, P or the scope.
inline ChannelSet generate_channel_set(const ScenarioConfig& cfg, const LinkGains& gains, std::uint64_t trial_seed,
                                       ChannelScope scope) {
  if (gains.cells() != cfg.cells() || gains.users() != cfg.N)
    throw std::invalid_argument("generate_channel_set: gain table does not match config");
  ChannelSet set(cfg.cells(), cfg.N, cfg.M, cfg.P, scope, trial_seed);
  for (int c = 0; c < cfg.cells(); ++c)
    for (int d = 0; d < cfg.cells(); ++d) {
      if (!ChannelSet::in_scope(scope, c, d)) continue;
      for (int i = 0; i < cfg.N; ++i) {
        RandomStream rng = trial_substream(trial_seed, StreamKind::link, c, d, i);
        set.set_link(c, d, i, synth_channel(cfg.M, cfg.P, gains.at(c, d, i), link_varsigma(cfg, c, d),
                                            cfg.n_clusters, rng));
      }
    }
  return set;
}

}  // namespace mmcell

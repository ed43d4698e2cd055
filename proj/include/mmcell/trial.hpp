// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "beamforming.hpp"
#include "channel.hpp"
#include "downlink.hpp"
#include "estimation.hpp"
#include "random.hpp"
#include "scenario.hpp"

namespace mmcell {

struct TrialRequest {
  bool rates = false;        // contaminated ZF in every cell, downlink SINR of the desired cell
  bool ls_baseline = false;  // fully-digital LS estimation and ZF in every cell
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  double path_gain = 0.0;  // common ϖ_k after power control
  ContaminationCoefficients coefficients;
  EquivalentChannelEstimate estimate;  // desired cell

  bool rejected = false;
  std::vector<SinrTerms> multi_cell;   // hybrid, contaminated estimates everywhere
  bool single_cell_rejected = false;
  std::vector<SinrTerms> single_cell;  // hybrid, perfect CSI, no neighbours

  bool ls_rejected = false;
  double ls_error_energy = 0.0;
  double ls_channel_energy = 0.0;
  std::vector<SinrTerms> ls;
};

inline LinkGains trial_link_gains(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.contamination_mode == ContaminationMode::explicit_xi_sq) return explicit_link_gains(cfg);
  RandomStream rng = trial_substream(seed, StreamKind::deployment);
  return geometric_link_gains(cfg, drop_deployment(cfg, rng));
}

// Amplitude applied to cross-cell links in the LS baseline. With the
// effective reference the LS error energy relative to the beamformed own
// channel equals ξ², i.e. the same error level as the hybrid estimator.
inline double ls_cross_scale(const ScenarioConfig& cfg) {
  if (cfg.ls_error_reference == LsErrorReference::physical) return 1.0;
  const double los = strongest_fraction(cfg.varsigma_intra);
  return std::sqrt(cfg.P * los + (1.0 - los));
}

inline BeamformerBank trial_bank(const ScenarioConfig& cfg, const ChannelSet& set, std::uint64_t seed) {
  auto pointing = strongest_pointing(set);
  if (cfg.aoa_error_std > 0.0) {
    RandomStream rng = trial_substream(seed, StreamKind::aoa_error);
    pointing = perturb_pointing(std::move(pointing), cfg.aoa_error_std, rng);
  }
  return build_bank(std::move(pointing), cfg.M, cfg.P);
}

namespace detail {

inline void run_ls(const ScenarioConfig& cfg, const ChannelSet& set, const BeamformerBank& bank,
                   const PilotBook& pilots, std::uint64_t seed, TrialOutcome& out) {
  const int cells = set.cells();
  const int n = set.users();
  const double scale = ls_cross_scale(cfg);
  std::vector<ZfPrecoder> precoders;
  CMatrix desired_true;
  for (int c = 0; c < cells; ++c) {
    CMatrix own(cfg.M, n);
    CMatrix cont = CMatrix::Zero(cfg.M, n);
    for (int i = 0; i < n; ++i) {
      own.col(i) = effective_uplink(set.link(c, c, i), bank.pointing(c).user_cos[i]);
      for (int d = 0; d < cells; ++d)
        if (d != c) cont.col(i) += scale * effective_uplink(set.link(c, d, i), bank.pointing(d).user_cos[i]);
    }
    RandomStream rng = trial_substream(seed, StreamKind::ls_noise, c);
    const LsEstimate est = ls_estimate_fully_digital(own, cont, pilots, cfg.pilot_energy(), cfg.noise_bs(), rng);
    if (c == 0) {
      out.ls_error_energy = est.error_energy();
      out.ls_channel_energy = est.channel_energy();
      desired_true = own.transpose();
    }
    auto zf = zf_precoder(est.g_hat.transpose());
    if (!zf) {
      out.ls_rejected = true;
      return;
    }
    precoders.push_back(std::move(*zf));
  }
  std::vector<CMatrix> leak(static_cast<std::size_t>(cells - 1), CMatrix(n, cfg.M));
  for (int l = 1; l < cells; ++l)
    for (int k = 0; k < n; ++k)
      leak[l - 1].row(k) = scale * effective_uplink(set.link(l, 0, k), bank.pointing(0).user_cos[k]).transpose();
  std::vector<ZfPrecoder> neighbors(precoders.begin() + 1, precoders.end());
  out.ls = downlink_sinr(desired_true, precoders.front(), leak, neighbors);
}

}  // namespace detail

// One Monte-Carlo trial: channels -> beams -> pilot phase -> (optionally)
// ZF downlink in every cell. Everything random is derived from `seed`.
inline TrialOutcome run_trial(const ScenarioConfig& cfg, std::uint64_t seed, TrialRequest req = {}) {
  TrialOutcome out;
  out.seed = seed;
  const LinkGains gains = trial_link_gains(cfg, seed);
  out.path_gain = gains.reference();
  out.coefficients = contamination_coefficients(gains);

  const bool full = req.rates || req.ls_baseline;
  const ChannelSet set = generate_channel_set(cfg, gains, seed, full ? ChannelScope::all_bs : ChannelScope::desired_bs);
  const BeamformerBank bank = trial_bank(cfg, set, seed);
  const PilotBook pilots = build_pilots(cfg.N);

  const int estimated_cells = req.rates ? set.cells() : 1;
  std::vector<UplinkProjections> proj;
  std::vector<EquivalentChannelEstimate> est;
  for (int c = 0; c < estimated_cells; ++c) {
    proj.push_back(project_uplink(set, bank, c));
    RandomStream rng = trial_substream(seed, StreamKind::bs_noise, c);
    const CMatrix noise = rf_chain_noise(bank.rf_matrix(c), pilots.size(), cfg.noise_bs(), rng);
    const CMatrix received = receive_block(proj[c].own, proj[c].contamination, pilots, cfg.pilot_energy(), noise);
    std::vector<double> own_gain(cfg.N);
    for (int i = 0; i < cfg.N; ++i) own_gain[i] = gains.at(c, c, i);
    est.push_back(estimate_equivalent(received, pilots, cfg.pilot_energy(), path_loss_compensation(own_gain),
                                      proj[c].own));
  }
  out.estimate = est.front();

  if (req.rates) {
    std::vector<ZfPrecoder> precoders;
    for (int c = 0; c < set.cells() && !out.rejected; ++c) {
      auto zf = zf_precoder(est[c].h_eq_hat);
      if (zf)
        precoders.push_back(std::move(*zf));
      else
        out.rejected = true;
    }
    if (!out.rejected) {
      std::vector<CMatrix> leak;
      for (int l = 1; l < set.cells(); ++l) leak.push_back(proj[l].per_cell[0]);
      std::vector<ZfPrecoder> neighbors(precoders.begin() + 1, precoders.end());
      out.multi_cell = downlink_sinr(proj[0].own, precoders.front(), leak, neighbors);
    }
    auto perfect = zf_precoder(est[0].compensation.asDiagonal() * proj[0].own);
    if (perfect)
      out.single_cell = downlink_sinr(proj[0].own, *perfect, {}, {});
    else
      out.single_cell_rejected = true;
  }

  if (req.ls_baseline) detail::run_ls(cfg, set, bank, pilots, seed, out);
  return out;
}

}  // namespace mmcell

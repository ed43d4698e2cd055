#include <catch_amalgamated.hpp>

#include <cmath>

#include <mmcell/estimation.hpp>
#include <mmcell/trial.hpp>

using namespace mmcell;
using Catch::Approx;

TEST_CASE("pilot book is orthonormal", "[estimation]") {
  for (int n : {1, 2, 5, 10, 16}) {
    const PilotBook b = build_pilots(n);
    CHECK((b.phi.adjoint() * b.phi - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.phi.cwiseAbs().array() - 1.0 / std::sqrt(double(n))).abs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS(build_pilots(0));
}

TEST_CASE("single-path uplink projection is diagonal", "[estimation]") {
  // Two users on distinct angles, one path each; the beams point exactly at
  // the path so the own block is diag(g sqrt(MP)) off the grid leakage.
  const int m = 16, p = 4;
  ChannelSet set(1, 2, m, p, ChannelScope::desired_bs, 0);
  set.set_link(0, 0, 0, RayChannel(m, p, {Ray{cd(0.5, 0.0), 0.0, 0.3}}));
  set.set_link(0, 0, 1, RayChannel(m, p, {Ray{cd(0.0, 2.0), 0.5, -0.6}}));
  const BeamformerBank bank = build_bank(set);
  const UplinkProjections u = project_uplink(set, bank, 0);
  CHECK(std::abs(u.own(0, 0) - cd(0.5 * 8.0, 0.0)) < 1e-12);
  CHECK(std::abs(u.own(1, 1) - cd(0.0, 2.0 * 8.0)) < 1e-12);
  // 0.5 apart on a 16-element array is a null of the Dirichlet kernel.
  CHECK(std::abs(u.own(0, 1)) < 1e-12);
  CHECK(std::abs(u.own(1, 0)) < 1e-12);
  CHECK(u.contamination.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RF chain noise keeps the antenna variance", "[estimation]") {
  const std::vector<CellPointing> pt = {{{0.1, -0.5, 0.7}, {0, 0, 0}}};
  const CMatrix f = build_bank(pt, 32, 1).rf_matrix(0);
  RandomStream rng(12);
  double acc = 0.0;
  const int reps = 4000;
  for (int t = 0; t < reps; ++t) acc += rf_chain_noise(f, 5, 2.5, rng).squaredNorm();
  CHECK(acc / (reps * 3 * 5) == Approx(2.5).epsilon(0.02));
  CHECK(rf_chain_noise(f, 5, 0.0, rng).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless pilot phase returns own plus contamination", "[estimation]") {
  ScenarioConfig cfg;
  cfg.M = 8;
  cfg.P = 2;
  cfg.N = 2;
  cfg.L = 1;
  cfg.xi_sq = 0.3;
  const LinkGains gains = explicit_link_gains(cfg);
  const ChannelSet set = generate_channel_set(cfg, gains, 404, ChannelScope::all_bs);
  const BeamformerBank bank = build_bank(set);
  const PilotBook pilots = build_pilots(2);
  RandomStream rng(1);
  const double ep = 7.0;
  const CMatrix s = uplink_receive(set, bank, 0, pilots, ep, 0.0, rng);

  // Dense oracle: every user transmits ŵ x its pilot, BS 0 combines with F.
  CMatrix dense = CMatrix::Zero(2, 2);
  const CMatrix f = bank.rf_matrix(0);
  for (int d = 0; d < 2; ++d)
    for (int i = 0; i < 2; ++i) {
      const CVector y = set.link(0, d, i).matrix() * bank.user_beam(d, i).conjugate();
      dense += std::sqrt(ep) * f.transpose() * y * pilots.phi.col(i).transpose();
    }
  CHECK((s - dense).cwiseAbs().maxCoeff() < 1e-10 * dense.cwiseAbs().maxCoeff());

  const UplinkProjections u = project_uplink(set, bank, 0);
  const RVector b = path_loss_compensation({gains.at(0, 0, 0), gains.at(0, 0, 1)});
  const EquivalentChannelEstimate est = estimate_equivalent(s, pilots, ep, b, u.own);
  CHECK((est.delta - u.contamination).cwiseAbs().maxCoeff() < 1e-10 * u.contamination.cwiseAbs().maxCoeff());
  CHECK(est.reconstruction_error() < 1e-8);
  CHECK((est.scaled_error() - b.asDiagonal() * u.contamination).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("compensated strongest path has LOS amplitude", "[estimation]") {
  // B·ϖ-weighted strongest path seen through its own beams: sqrt(ς/(ς+1) MP).
  ScenarioConfig cfg;
  cfg.M = 64;
  cfg.P = 8;
  cfg.N = 1;
  const LinkGains gains = explicit_link_gains(cfg);
  const ChannelSet set = generate_channel_set(cfg, gains, 3, ChannelScope::desired_bs);
  const Ray r = set.intra(0).strongest();
  const RayChannel los(cfg.M, cfg.P, {r});
  const CRowVector row = project_link(los, r.cos_user, {r.cos_bs});
  const double b = path_loss_compensation({gains.reference()})(0);
  CHECK(b * std::abs(row(0)) == Approx(std::sqrt(0.8 * cfg.M * cfg.P)).epsilon(1e-12));
}

TEST_CASE("estimate input validation", "[estimation]") {
  const PilotBook p = build_pilots(2);
  RVector b(2);
  b << 1.0, 0.0;
  CHECK_THROWS(estimate_equivalent(CMatrix::Zero(3, 2), p, 1.0, b, CMatrix::Zero(2, 3)));
  b << 1.0, 1.0;
  CHECK_THROWS(estimate_equivalent(CMatrix::Zero(3, 2), p, 0.0, b, CMatrix::Zero(2, 3)));
  CHECK_NOTHROW(estimate_equivalent(CMatrix::Zero(3, 2), p, 1.0, b, CMatrix::Zero(2, 3)));
}

TEST_CASE("analytical NMSE examples", "[estimation]") {
  CHECK(analytical_nmse({0.005, 0.005}, 1.0, 1.0, 0.0, 10, 10) == Approx(1e-4));
  CHECK(analytical_nmse({}, 2.0, 5.0, 1.0, 4, 5) == Approx(1.0 / 200.0));
  CHECK(analytical_nmse({0.01}, 1e-10, 100.0, 1e-12, 32, 10) == Approx(0.01 / 320 + 1e-12 / (1e-8 * 320)));
  CHECK(analytical_nmse({0.1, 0.2}, 1.0, 1.0, 0.3, 40, 10) == analytical_nmse({0.1, 0.2}, 1.0, 1.0, 0.3, 10, 40));
  CHECK_THROWS(analytical_nmse({0.1}, 1.0, 1.0, 0.0, 0, 4));
}

TEST_CASE("empirical NMSE of a trivial estimate", "[estimation]") {
  EquivalentChannelEstimate e;
  e.h_eq_true = CMatrix::Zero(2, 3);
  e.compensation = RVector::Ones(2);
  e.h_eq_hat = CMatrix::Ones(2, 3);
  e.delta = e.h_eq_hat;
  const RVector n = empirical_nmse({e, e}, 3, 2);
  CHECK(n(0) == Approx(3.0 / (2 * 3 * 2)));
  e.h_eq_hat.setZero();
  CHECK(empirical_nmse({e}, 3, 2).maxCoeff() == 0.0);
  CHECK_THROWS(empirical_nmse({}, 3, 2));
}

TEST_CASE("empirical NMSE follows the closed form", "[estimation]") {
  ScenarioConfig cfg;
  cfg.M = 32;
  cfg.P = 4;
  cfg.N = 4;
  cfg.L = 3;
  cfg.xi_sq = 0.05;
  cfg.E_P = 0.2;
  std::vector<EquivalentChannelEstimate> est;
  for (int t = 0; t < 600; ++t) est.push_back(run_trial(cfg, trial_seed(17, t)).estimate);
  const RVector emp = empirical_nmse(est, cfg.M, cfg.P);
  const TrialOutcome one = run_trial(cfg, trial_seed(17, 0));
  for (int k = 0; k < cfg.N; ++k) {
    std::vector<double> rho;
    for (const auto& r : one.coefficients.rho_sq) rho.push_back(r[k]);
    const double ana = analytical_nmse(rho, one.path_gain, cfg.pilot_energy(), cfg.noise_bs(), cfg.M, cfg.P);
    INFO("user " << k);
    CHECK(emp(k) == Approx(ana).epsilon(0.15));
  }
}

TEST_CASE("fully-digital LS estimate", "[estimation]") {
  RandomStream rng(6);
  const PilotBook p = build_pilots(3);
  const CMatrix g = rng.complex_normal_matrix(8, 3, 1.0);
  const CMatrix zero = CMatrix::Zero(8, 3);
  const LsEstimate exact = ls_estimate_fully_digital(g, zero, p, 2.0, 0.0, rng);
  CHECK(exact.error_energy() < 1e-24);
  const CMatrix cont = rng.complex_normal_matrix(8, 3, 1.0);
  const LsEstimate c = ls_estimate_fully_digital(g, cont, p, 2.0, 0.0, rng);
  CHECK((c.g_hat - g - cont).cwiseAbs().maxCoeff() < 1e-12);

  // Noise only: each entry of the error is CN(0, σ²/E_P).
  double acc = 0.0;
  const int reps = 5000;
  for (int t = 0; t < reps; ++t) acc += ls_estimate_fully_digital(g, zero, p, 4.0, 0.8, rng).error_energy();
  CHECK(acc / (reps * 8 * 3) == Approx(0.8 / 4.0).epsilon(0.03));
  CHECK_THROWS(ls_estimate_fully_digital(g, CMatrix::Zero(8, 2), p, 1.0, 0.0, rng));
}

TEST_CASE("LS error level matches the contamination level at every M", "[estimation]") {
  ScenarioConfig cfg;
  cfg.xi_sq = 0.2;
  cfg.trials = 40;
  for (int m : {64, 256}) {
    cfg.M = m;
    double err = 0.0, ref = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      const TrialOutcome o = run_trial(cfg, trial_seed(5, t), TrialRequest{false, true});
      err += o.ls_error_energy;
      ref += o.ls_channel_energy;
    }
    INFO("M = " << m);
    CHECK(err / ref / 0.2 >= 0.8);
    CHECK(err / ref / 0.2 <= 1.25);
  }
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <mmcell/channel.hpp>
#include <mmcell/channel_dump.hpp>

using namespace mmcell;
using Catch::Approx;

static bool close(cd a, cd b, double tol = 1e-12) { return std::abs(a - b) < tol; }

TEST_CASE("ula_response examples", "[channel]") {
  const CVector a = ula_response(4, kPi / 2);
  for (int m = 0; m < 4; ++m) CHECK(close(a(m), 1.0));
  const CVector b = ula_response(2, 0.0);
  CHECK(close(b(0), 1.0));
  CHECK(close(b(1), -1.0));
  const CVector c = ula_response(4, kPi / 3);
  CHECK(close(c(0), 1.0));
  CHECK(close(c(1), cd(0, -1)));
  CHECK(close(c(2), -1.0));
  CHECK(close(c(3), cd(0, 1)));
  CHECK_THROWS(ula_response(4, -0.1));
  CHECK_THROWS(ula_response(4, 3.5));
  CHECK_THROWS(ula_response(0, 1.0));
}

TEST_CASE("array responses have unit modulus", "[channel]") {
  RandomStream rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform(0, 300));
    const CVector a = ula_response(n, rng.uniform(0, kPi));
    CHECK(close(a(0), 1.0));
    CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sample_angles draws uniform cosines", "[channel]") {
  RandomStream rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const double c = sample_angles(0, rng).strongest_bs;
    CHECK((c >= -1.0 && c <= 1.0));
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(sq / n - mean * mean == Approx(1.0 / 3.0).epsilon(0.02));

  RandomStream a(5), b(5);
  const AngleSet x = sample_angles(8, a), y = sample_angles(8, b);
  CHECK(x.strongest_bs == y.strongest_bs);
  CHECK(x.cluster_user == y.cluster_user);
}

TEST_CASE("strongest-only limit is rank one", "[channel]") {
  ScenarioConfig cfg;
  cfg.M = 32;
  cfg.P = 8;
  cfg.varsigma_intra = 1e12;
  RandomStream rng(2);
  const double pg = 3.0e-9;
  const CMatrix h = synth_intra(cfg, pg, rng).matrix() / std::sqrt(pg);
  const Eigen::JacobiSVD<CMatrix> svd(h);
  CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-5);
  CHECK(h.squaredNorm() == Approx(cfg.M * cfg.P).epsilon(1e-6));
}

TEST_CASE("zero path gain gives a zero channel", "[channel]") {
  ScenarioConfig cfg;
  cfg.M = 16;
  cfg.P = 4;
  RandomStream rng(1);
  CHECK(synth_intra(cfg, 0.0, rng).matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel energy and strongest-path fraction", "[channel]") {
  const int m = 16, p = 4, draws = 10000;
  const double pg = 2.5e-10;
  for (double vs : {0.0, 2.0, 5.0}) {
    RandomStream rng(100 + static_cast<std::uint64_t>(vs));
    double total = 0.0, strongest = 0.0;
    for (int t = 0; t < draws; ++t) {
      const RayChannel ch = synth_channel(m, p, pg, vs, 8, rng);
      total += ch.matrix().squaredNorm();
      strongest += ch.strongest_term().squaredNorm();
    }
    INFO("varsigma = " << vs);
    CHECK(total / draws / (pg * m * p) == Approx(1.0).epsilon(0.02));
    CHECK(strongest / draws == Approx(pg * m * p * vs / (vs + 1.0)).epsilon(1e-9));
    CHECK(strongest / total == Approx(vs / (vs + 1.0)).margin(0.02));
  }
}

TEST_CASE("inter-cell links share the intra construction", "[channel]") {
  ScenarioConfig cfg;
  cfg.M = 12;
  cfg.P = 3;
  RandomStream a(9), b(9), c(9);
  const CMatrix intra = synth_intra(cfg, 1.0, a).matrix();
  const CMatrix up = synth_inter_uplink(cfg, 1.0, cfg.varsigma_intra, b).matrix();
  const RayChannel down = synth_inter_downlink(cfg, 1.0, cfg.varsigma_intra, c);
  CHECK((intra - up).norm() == 0.0);
  CHECK(down.downlink_matrix().rows() == cfg.P);
  CHECK(down.downlink_matrix().cols() == cfg.M);
  CHECK((down.downlink_matrix() - intra.transpose()).norm() == 0.0);

  RandomStream d(4);
  const RayChannel nolos = synth_inter_uplink(cfg, 1.0, 0.0, d);
  CHECK(nolos.strongest().gain == cd(0.0, 0.0));
}

TEST_CASE("channel sets are reproducible per trial", "[channel]") {
  ScenarioConfig cfg;
  cfg.M = 24;
  cfg.P = 4;
  cfg.N = 3;
  cfg.L = 2;
  const LinkGains gains = explicit_link_gains(cfg);
  const ChannelSet s1 = generate_channel_set(cfg, gains, 77, ChannelScope::all_bs);
  const ChannelSet s2 = generate_channel_set(cfg, gains, 77, ChannelScope::all_bs);
  const ChannelSet s3 = generate_channel_set(cfg, gains, 78, ChannelScope::all_bs);
  const ChannelSet narrow = generate_channel_set(cfg, gains, 77, ChannelScope::desired_bs);
  ScenarioConfig big = cfg;
  big.M = 96;
  const ChannelSet wide = generate_channel_set(big, gains, 77, ChannelScope::all_bs);
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d)
      for (int i = 0; i < 3; ++i) {
        CHECK((s1.link(c, d, i).matrix() - s2.link(c, d, i).matrix()).norm() == 0.0);
        CHECK((s1.link(c, d, i).matrix() - s3.link(c, d, i).matrix()).norm() > 0.0);
        CHECK(s1.link(c, d, i).strongest().cos_bs == wide.link(c, d, i).strongest().cos_bs);
        CHECK(narrow.has_link(c, d, i) == (c == 0 || c == d));
        if (narrow.has_link(c, d, i))
          CHECK((narrow.link(c, d, i).matrix() - s1.link(c, d, i).matrix()).norm() == 0.0);
      }
  CHECK_THROWS(narrow.link(1, 2, 0));
  CHECK(s1.intra(0).strongest().gain.real() == Approx(std::sqrt(gains.reference() * 0.8)));
  CHECK(link_varsigma(cfg, 1, 1) == cfg.varsigma_intra);
  CHECK(link_varsigma(cfg, 1, 0) == cfg.varsigma_inter_dl);
  CHECK(link_varsigma(cfg, 0, 2) == cfg.varsigma_inter_ul);
}

TEST_CASE("channel dump round-trips", "[channel]") {
  ScenarioConfig cfg;
  cfg.M = 10;
  cfg.P = 3;
  cfg.N = 2;
  cfg.L = 1;
  const ChannelSet set = generate_channel_set(cfg, explicit_link_gains(cfg), 31337, ChannelScope::desired_bs);
  const auto path = (std::filesystem::temp_directory_path() / "mmcell_dump_test.bin").string();
  write_channel_dump(path, set);
  const ChannelDump dump = read_channel_dump(path);
  std::filesystem::remove(path);
  CHECK(dump.seed == 31337);
  CHECK(dump.bs_antennas == 10);
  CHECK(dump.user_antennas == 3);
  REQUIRE(dump.links.size() == 6);
  for (const auto& l : dump.links) {
    const CMatrix ref = set.link(l.bs, l.cell, l.user).matrix();
    CHECK((l.h - ref).cwiseAbs().maxCoeff() <= 1e-6 * ref.cwiseAbs().maxCoeff());
  }
}

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <mmcell/mmcell.hpp>

using namespace mmcell;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Least-squares fit y = a x + b; returns {a, R²}.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double a = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (a * x[i] + my - a * mx);
    ss_res += r * r;
  }
  return {a, 1.0 - ss_res / syy};
}

void criteria_1_2(unsigned workers) {
  ScenarioConfig cfg = fig3_config();
  Fig3Grid grid;
  grid.bs_antennas = {32, 64, 128};
  grid.user_antennas = {10};
  const ExperimentResult r = run_fig3(cfg, grid, workers);
  bool ok = true;
  std::string detail;
  std::vector<double> lx, ly;
  for (const auto& row : r.rows) {
    const double rel = std::abs(row.empirical - row.analytical) / row.analytical;
    ok = ok && rel < 0.20;
    detail += fmt("M=%g rel=%.4f ", row.sweep_value, rel);
    lx.push_back(std::log2(row.sweep_value));
    ly.push_back(std::log2(row.empirical));
  }
  report(1, ok, detail + "(tol 0.20)");

  const double slope = linear_fit(lx, ly).first;
  ScenarioConfig a = cfg, b = cfg;
  a.M = 40;
  a.P = 10;
  b.M = 10;
  b.P = 40;
  const ResultRow ra = detail::nmse_row(a, "a", 40, workers);
  const ResultRow rb = detail::nmse_row(b, "b", 10, workers);
  const double ana_diff = std::abs(ra.analytical - rb.analytical);
  const double emp_rel = std::abs(ra.empirical - rb.empirical) / ra.empirical;
  const bool ok2 = std::abs(slope + 1.0) <= 0.15 && ana_diff == 0.0 && emp_rel < 0.15;
  report(2, ok2, fmt("slope=%.4f analytical_swap_diff=%.3g ", slope, ana_diff) +
                     fmt("empirical_swap_rel=%.4f (tol slope -1+-0.15, diff 0, rel 0.15)", emp_rel));
}

void criterion_3() {
  ScenarioConfig cfg = fig4_config();
  double worst = 0.0;
  int used = 0;
  for (int t = 0; t < 100; ++t) {
    const TrialOutcome o = run_trial(cfg, trial_seed(cfg.seed, t));
    const auto zf = zf_precoder(o.estimate.h_eq_hat);
    if (!zf) continue;
    ++used;
    const CMatrix e = o.estimate.h_eq_hat * zf->w - CMatrix::Identity(cfg.N, cfg.N);
    worst = std::max(worst, e.cwiseAbs().maxCoeff());
  }
  report(3, used == 100 && worst < 1e-10, fmt("instances=%g N=10 max_abs_err=%.3g (tol 1e-10)", used, worst));
}

void criterion_4(unsigned workers) {
  ScenarioConfig cfg = fig4_config();
  Fig4Grid grid;
  grid.power_dbm.clear();
  for (int p = 26; p <= 46; p += 2) grid.power_dbm.push_back(p);
  const ExperimentResult r = run_fig4(cfg, grid, workers);
  bool tight = true, dominated = true;
  double worst = 0.0;
  std::string detail;
  for (const auto& row : r.rows) {
    const double rel = std::abs(row.empirical - row.analytical) / row.empirical;
    worst = std::max(worst, rel);
    tight = tight && rel < 0.05;
    dominated = dominated && row.extras[0] >= row.empirical && row.extras[0] >= row.analytical;
    detail += fmt("%gdBm:%.4f ", row.sweep_value, rel);
  }
  report(4, tight && dominated,
         detail + fmt("worst=%.4f upper_bound_dominates=", worst) + (dominated ? "yes" : "no") + " (tol 0.05)");
}

void criterion_5(unsigned workers) {
  const ScenarioConfig cfg = fig5_config();
  const Fig5Grid grid;
  const ExperimentResult r = run_fig5(cfg, grid, workers);
  std::vector<double> lx, hy;
  double ls256 = NAN, ls512 = NAN;
  bool beats = true;
  std::string detail;
  for (const auto& row : r.rows) {
    lx.push_back(std::log2(row.sweep_value));
    hy.push_back(row.empirical);
    const double ls = row.extras[2];
    beats = beats && row.empirical > ls;
    if (row.sweep_value == 256) ls256 = ls;
    if (row.sweep_value == 512) ls512 = ls;
    detail += fmt("M=%g hybrid=%.3f ls=%.3f ", row.sweep_value, row.empirical, ls);
  }
  const double r2 = linear_fit(lx, hy).second;
  const double gain = ls512 - ls256;
  report(5, r2 > 0.99 && gain < 0.2 && beats,
         detail + fmt("R2=%.4f ls_gain_256_512=%.3f ", r2, gain) +
             "hybrid_beats_ls=" + (beats ? "yes" : "no") + " (tol R2>0.99, gain<0.2)");
}

void criterion_6() {
  bool ok = true;
  std::string detail;
  for (int n : {1, 2, 7, 64, 333, 1024}) {
    const double err = std::abs(mean_array_gain(n) - 1.0);
    ok = ok && err <= 1e-9;
    detail += fmt("n=%g err=%.2g ", n, err);
  }
  report(6, ok, detail + "(tol 1e-9)");
}

void criterion_7() {
  const int draws = 10000;
  const double pg = 1.0e-10;
  bool ok = true;
  std::string detail;
  int stream = 0;
  for (double vs : {0.0, 2.0, 5.0}) {
    ScenarioConfig cfg;
    cfg.varsigma_intra = vs;
    for (int kind = 0; kind < 2; ++kind) {
      RandomStream rng(derive_seed(cfg.seed, StreamKind::selftest, ++stream));
      double acc = 0.0;
      for (int t = 0; t < draws; ++t) {
        const RayChannel ch = kind == 0 ? synth_intra(cfg, pg, rng) : synth_inter_uplink(cfg, pg, vs, rng);
        acc += ch.matrix().squaredNorm();
      }
      const double ratio = acc / draws / (pg * cfg.M * cfg.P);
      ok = ok && std::abs(ratio - 1.0) <= 0.02;
      detail += fmt(kind == 0 ? "intra(vs=%g)=%.4f " : "inter(vs=%g)=%.4f ", vs, ratio);
    }
  }
  report(7, ok, detail + "(tol 0.02)");
}

void criterion_8() {
  ScenarioConfig rate = fig4_config();
  rate.trials = 30;
  rate.M = 64;
  rate.seed = 4242;
  ScenarioConfig nmse = fig3_config();
  nmse.trials = 60;
  nmse.seed = 4242;
  Fig3Grid g3;
  g3.bs_antennas = {16, 64};
  Fig4Grid g4;
  g4.power_dbm = {26, 36, 46};
  Fig5Grid g5;
  g5.bs_antennas = {64, 128};
  ScenarioConfig f5 = fig5_config();
  f5.trials = 12;
  f5.seed = 4242;

  auto all = [&](unsigned w) {
    return std::vector<std::string>{to_csv(run_fig3(nmse, g3, w)), to_csv(run_fig4(rate, g4, w)),
                                    to_csv(run_fig5(f5, g5, w)), to_csv(run_nmse(nmse, w)),
                                    to_csv(run_rate(rate, w))};
  };
  const auto ref = all(1);
  bool ok = true;
  for (unsigned w : {1u, 2u, 4u, 7u}) ok = ok && all(w) == ref;
  report(8, ok, "fig3/fig4/fig5/nmse/rate CSV identical for workers 1,1,2,4,7");
}

}  // namespace

int main() {
  const unsigned workers = default_workers();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  criteria_1_2(workers);
  criterion_3();
  criterion_4(workers);
  criterion_5(workers);
  criterion_6();
  criterion_7();
  criterion_8();
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("%d failed, %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}

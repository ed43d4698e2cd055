// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "config_io.hpp"
#include "downlink.hpp"
#include "estimation.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "trial.hpp"

namespace mmcell {

struct ResultRow {
  std::string series;
  double sweep_value = 0.0;
  double empirical = 0.0;
  double analytical = std::numeric_limits<double>::quiet_NaN();
  double ci_half_width = 0.0;
  long trials = 0;
  long rejected = 0;
  std::vector<double> extras;
};

struct ExperimentResult {
  std::string experiment;
  std::string sweep_name;
  std::vector<std::string> extra_columns;
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
  std::string fingerprint;

  void sort_rows() {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ResultRow& a, const ResultRow& b) { return a.sweep_value < b.sweep_value; });
  }
};

// Sample mean and 95% normal-approximation half-width.
struct Summary {
  double mean = 0.0;
  double ci_half_width = 0.0;
  long count = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = static_cast<long>(xs.size());
  if (xs.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.ci_half_width = 1.96 * std::sqrt(ss / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

struct Fig3Grid {
  std::vector<int> bs_antennas{16, 32, 64, 128, 256};
  std::vector<int> user_antennas{4, 10};
};

struct Fig4Grid {
  std::vector<double> power_dbm = [] {
    std::vector<double> p;
    for (int d = 20; d <= 46; d += 2) p.push_back(d);
    return p;
  }();
};

struct Fig5Grid {
  std::vector<int> bs_antennas{64, 96, 128, 192, 256, 384, 512};
};

inline ScenarioConfig fig3_config() {
  ScenarioConfig c;
  c.N = 10;
  c.P = 10;
  c.varsigma_intra = 5.0;
  c.varsigma_inter_ul = 5.0;
  c.varsigma_inter_dl = 5.0;
  c.xi_sq = 0.01;
  c.max_tx_power_dbm = 46.0;
  c.trials = 2000;
  return c;
}

inline ScenarioConfig fig4_config() {
  ScenarioConfig c;
  c.M = 200;
  c.N = 10;
  c.P = 10;
  c.varsigma_intra = 4.0;
  c.varsigma_inter_ul = 2.0;
  c.varsigma_inter_dl = 2.0;
  c.xi_sq = 0.01;
  c.max_tx_power_dbm = 46.0;
  c.trials = 500;
  return c;
}

inline ScenarioConfig fig5_config() {
  ScenarioConfig c = fig4_config();
  c.xi_sq = 0.2;
  return c;
}

namespace detail {

inline ExperimentResult new_result(const std::string& id, const std::string& sweep, const ScenarioConfig& cfg) {
  ExperimentResult r;
  r.experiment = id;
  r.sweep_name = sweep;
  r.seed = cfg.seed;
  r.fingerprint = config_fingerprint(cfg);
  return r;
}

inline std::vector<TrialOutcome> run_trials(const ScenarioConfig& cfg, TrialRequest req, unsigned workers) {
  cfg.validate();
  return parallel_map(
      static_cast<std::size_t>(cfg.trials),
      [&](std::size_t t) { return run_trial(cfg, trial_seed(cfg.seed, t), req); }, workers);
}

struct NmsePoint {
  double empirical = 0.0;
  double analytical = 0.0;
};

inline ResultRow nmse_row(const ScenarioConfig& cfg, const std::string& series, double sweep, unsigned workers) {
  cfg.validate();
  const auto points = parallel_map(
      static_cast<std::size_t>(cfg.trials),
      [&](std::size_t t) {
        const TrialOutcome o = run_trial(cfg, trial_seed(cfg.seed, t), {});
        NmsePoint p;
        const double norm = static_cast<double>(cfg.N) * cfg.M * cfg.P;
        for (int k = 0; k < cfg.N; ++k) {
          p.empirical += row_error_energy(o.estimate, k) / norm;
          std::vector<double> rho;
          for (const auto& l : o.coefficients.rho_sq) rho.push_back(l[k]);
          p.analytical += analytical_nmse(rho, o.path_gain, cfg.pilot_energy(), cfg.noise_bs(), cfg.M, cfg.P);
        }
        p.empirical /= cfg.N;
        p.analytical /= cfg.N;
        return p;
      },
      workers);
  std::vector<double> emp;
  double ana = 0.0;
  for (const auto& p : points) {
    emp.push_back(p.empirical);
    ana += p.analytical;
  }
  const Summary s = summarize(emp);
  ResultRow row;
  row.series = series;
  row.sweep_value = sweep;
  row.empirical = s.mean;
  row.analytical = ana / points.size();
  row.ci_half_width = s.ci_half_width;
  row.trials = s.count;
  return row;
}

inline double mean_closed_form_rate(const ScenarioConfig& cfg, const std::vector<TrialOutcome>& outcomes, double es) {
  const double bb = beta_bar(cfg.varsigma_intra, cfg.M, cfg.P, cfg.N);
  double acc = 0.0;
  long count = 0;
  for (const auto& o : outcomes) {
    for (int k = 0; k < cfg.N; ++k) {
      std::vector<double> rho, zeta;
      for (const auto& l : o.coefficients.rho_sq) rho.push_back(l[k]);
      for (const auto& l : o.coefficients.zeta_sq) zeta.push_back(l[k]);
      acc += theorem2_rate(rho, zeta, cfg.varsigma_intra, cfg.M, cfg.P, cfg.N, bb, o.path_gain, es, cfg.noise_ms());
      ++count;
    }
  }
  return acc / count;
}

// Empirical rate per trial, averaged over users; rejected trials are skipped.
inline Summary rate_summary(const std::vector<TrialOutcome>& outcomes, std::vector<SinrTerms> TrialOutcome::*terms,
                            bool TrialOutcome::*rejected, double es, double noise, long* rejected_count) {
  std::vector<double> rates;
  long rej = 0;
  for (const auto& o : outcomes) {
    if (o.*rejected) {
      ++rej;
      continue;
    }
    rates.push_back(average_rate(o.*terms, es, noise));
  }
  if (rejected_count) *rejected_count = rej;
  return summarize(rates);
}

inline ResultRow rate_row(const ScenarioConfig& cfg, const std::vector<TrialOutcome>& outcomes,
                          const std::string& series, double sweep, double es) {
  ResultRow row;
  row.series = series;
  row.sweep_value = sweep;
  long rej = 0;
  const Summary s = rate_summary(outcomes, &TrialOutcome::multi_cell, &TrialOutcome::rejected, es, cfg.noise_ms(), &rej);
  row.empirical = s.mean;
  row.ci_half_width = s.ci_half_width;
  row.trials = s.count;
  row.rejected = rej;
  row.analytical = mean_closed_form_rate(cfg, outcomes, es);
  const Summary single = rate_summary(outcomes, &TrialOutcome::single_cell, &TrialOutcome::single_cell_rejected, es,
                                      cfg.noise_ms(), nullptr);
  row.extras = {upper_bound_rate(cfg.M, cfg.P, cfg.N, cfg.varsigma_intra, es, cfg.noise_ms(), outcomes.front().path_gain),
                single.mean};
  return row;
}

}  // namespace detail

inline ExperimentResult run_fig3(const ScenarioConfig& base, const Fig3Grid& grid, unsigned workers) {
  base.validate();
  ExperimentResult r = detail::new_result("fig3", "M", base);
  for (int p : grid.user_antennas)
    for (int m : grid.bs_antennas) {
      ScenarioConfig cfg = base;
      cfg.M = m;
      cfg.P = p;
      r.rows.push_back(detail::nmse_row(cfg, "P=" + std::to_string(p), m, workers));
    }
  r.sort_rows();
  return r;
}

inline ExperimentResult run_nmse(const ScenarioConfig& cfg, unsigned workers) {
  cfg.validate();
  ExperimentResult r = detail::new_result("nmse", "M", cfg);
  r.rows.push_back(detail::nmse_row(cfg, "P=" + std::to_string(cfg.P), cfg.M, workers));
  return r;
}

inline const std::vector<std::string>& rate_extra_columns() {
  static const std::vector<std::string> cols{"upper_bound_analytical", "single_cell_empirical"};
  return cols;
}

// The pilot phase does not depend on the downlink power, so one set of
// trials serves every power point.
inline ExperimentResult run_fig4(const ScenarioConfig& cfg, const Fig4Grid& grid, unsigned workers) {
  cfg.validate();
  ExperimentResult r = detail::new_result("fig4", "max_tx_power_dbm", cfg);
  r.extra_columns = rate_extra_columns();
  const auto outcomes = detail::run_trials(cfg, {.rates = true}, workers);
  for (double p : grid.power_dbm) {
    const double es = dbm_to_watt(p + cfg.bs_antenna_gain_dbi);
    r.rows.push_back(detail::rate_row(cfg, outcomes, "multi_cell", p, es));
  }
  r.sort_rows();
  return r;
}

inline ExperimentResult run_rate(const ScenarioConfig& cfg, unsigned workers) {
  cfg.validate();
  ExperimentResult r = detail::new_result("rate", "M", cfg);
  r.extra_columns = rate_extra_columns();
  const auto outcomes = detail::run_trials(cfg, {.rates = true}, workers);
  r.rows.push_back(detail::rate_row(cfg, outcomes, "multi_cell", cfg.M, cfg.symbol_energy()));
  return r;
}

inline ExperimentResult run_fig5(const ScenarioConfig& base, const Fig5Grid& grid, unsigned workers) {
  base.validate();
  ExperimentResult r = detail::new_result("fig5", "M", base);
  r.extra_columns = rate_extra_columns();
  r.extra_columns.insert(r.extra_columns.end(), {"ls_empirical", "ls_ci_half_width", "ls_rejected", "ls_nmse"});
  for (int m : grid.bs_antennas) {
    ScenarioConfig cfg = base;
    cfg.M = m;
    const auto outcomes = detail::run_trials(cfg, {.rates = true, .ls_baseline = true}, workers);
    const double es = cfg.symbol_energy();
    ResultRow row = detail::rate_row(cfg, outcomes, "hybrid", m, es);
    long ls_rej = 0;
    const Summary ls = detail::rate_summary(outcomes, &TrialOutcome::ls, &TrialOutcome::ls_rejected, es,
                                            cfg.noise_ms(), &ls_rej);
    double err = 0.0, ref = 0.0;
    for (const auto& o : outcomes) {
      err += o.ls_error_energy;
      ref += o.ls_channel_energy;
    }
    row.extras.insert(row.extras.end(), {ls.mean, ls.ci_half_width, static_cast<double>(ls_rej), err / ref});
    r.rows.push_back(std::move(row));
  }
  r.sort_rows();
  return r;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv(const ExperimentResult& r) {
  std::string out = "experiment,series,sweep_name,sweep_value,empirical,analytical,ci_half_width,trials,rejected";
  for (const auto& c : r.extra_columns) out += "," + c;
  out += ",seed,config_fingerprint\n";
  for (const auto& row : r.rows) {
    out += r.experiment + "," + row.series + "," + r.sweep_name + "," + format_number(row.sweep_value) + "," +
           format_number(row.empirical) + "," + format_number(row.analytical) + "," +
           format_number(row.ci_half_width) + "," + std::to_string(row.trials) + "," + std::to_string(row.rejected);
    for (std::size_t i = 0; i < r.extra_columns.size(); ++i)
      out += "," + (i < row.extras.size() ? format_number(row.extras[i]) : std::string());
    out += "," + std::to_string(r.seed) + "," + r.fingerprint + "\n";
  }
  return out;
}

inline void emit_csv(const ExperimentResult& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << to_csv(r);
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace mmcell

// SPDX-License-Identifier: Apache-2.0
// mmcell-sim: command-line driver for the multi-cell hybrid mmWave simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mmcell/mmcell.hpp>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumeric = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      const auto parts = split(text, ':');
      if (parts.size() != 3) throw UsageError(flag + " expects start:stop:step");
      const double start = std::stod(parts[0]);
      const double stop = std::stod(parts[1]);
      const double step = std::stod(parts[2]);
      if (!(step > 0.0) || stop < start) throw UsageError(flag + ": need step > 0 and stop >= start");
      for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-9 * step) break;
        out.push_back(v);
      }
    } else {
      for (const auto& p : split(text, ',')) out.push_back(std::stod(p));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError(flag + ": cannot parse '" + text + "'");
  }
  if (out.empty()) throw UsageError(flag + ": empty grid");
  return out;
}

std::vector<int> parse_int_grid(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_grid(text, flag)) {
    if (v != static_cast<int>(v) || v < 1) throw UsageError(flag + ": values must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct Command {
  CLI::App* app = nullptr;
  std::string config_file;
  std::string out_dir;
  std::string m_grid;
  std::string p_grid;
  std::string power_grid;
  int dump_trials = 0;
  unsigned workers = 0;
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> override_opts;
};

void add_config_options(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_file, "key = value config file")->check(CLI::ExistingFile);
  cmd.app->add_option("--workers", cmd.workers, "worker threads (default: $MMCELL_WORKERS or all cores)");
  for (const auto& f : mmcell::config_fields()) {
    std::string names = "--" + f.key;
    std::string dashed = f.key;
    for (char& c : dashed)
      if (c == '_') c = '-';
    if (dashed != f.key) names += ",--" + dashed;
    cmd.override_opts[f.key] = cmd.app->add_option(names, cmd.overrides[f.key], f.help);
  }
}

mmcell::ScenarioConfig resolve_config(const Command& cmd, mmcell::ScenarioConfig cfg) {
  if (!cmd.config_file.empty()) mmcell::apply_config_file(cfg, cmd.config_file);
  for (const auto& f : mmcell::config_fields())
    if (cmd.override_opts.at(f.key)->count() > 0) f.set(cfg, cmd.overrides.at(f.key));
  cfg.validate();
  return cfg;
}

std::string prepare_out(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw UsageError("cannot use output directory '" + dir + "'");
  return (std::filesystem::path(dir) / name).string();
}

void report(const mmcell::ExperimentResult& r, const std::string& path) {
  long rejected = 0;
  for (const auto& row : r.rows) rejected += row.rejected;
  std::fprintf(stderr, "%s: %zu rows -> %s", r.experiment.c_str(), r.rows.size(), path.c_str());
  if (rejected > 0) std::fprintf(stderr, " (%ld rejected trials)", rejected);
  std::fprintf(stderr, "\n");
  for (const auto& row : r.rows)
    std::printf("%-12s %s=%-8s empirical=%-14s analytical=%-14s +/-%s\n", row.series.c_str(), r.sweep_name.c_str(),
                mmcell::format_number(row.sweep_value).c_str(), mmcell::format_number(row.empirical).c_str(),
                mmcell::format_number(row.analytical).c_str(), mmcell::format_number(row.ci_half_width).c_str());
}

void write(const mmcell::ExperimentResult& r, const std::string& out_dir) {
  const std::string path = prepare_out(out_dir, r.experiment + ".csv");
  try {
    mmcell::emit_csv(r, path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  report(r, path);
}

void dump_channels(const mmcell::ScenarioConfig& cfg, int count, const std::string& out_dir, bool full) {
  for (int t = 0; t < count && t < cfg.trials; ++t) {
    const std::uint64_t seed = mmcell::trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
    const auto set = mmcell::generate_channel_set(cfg, mmcell::trial_link_gains(cfg, seed), seed,
                                                  full ? mmcell::ChannelScope::all_bs : mmcell::ChannelScope::desired_bs);
    mmcell::write_channel_dump(prepare_out(out_dir, "channels_trial" + std::to_string(t) + ".bin"), set);
  }
}

bool all_finite(const mmcell::ExperimentResult& r) {
  for (const auto& row : r.rows)
    if (!std::isfinite(row.empirical)) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell hybrid mmWave pilot-contamination simulator"};
  app.require_subcommand(1);

  std::map<std::string, Command> cmds;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"fig3", "channel-estimation NMSE versus M"},
      {"fig4", "average rate versus BS transmit power"},
      {"fig5", "average rate versus M, hybrid and LS fully-digital"},
      {"nmse", "single NMSE point at the configured M, P"},
      {"rate", "single rate point at the configured M, P and power"},
      {"selftest", "analytic identity checks"}};
  for (const auto& [name, help] : names) {
    Command& cmd = cmds[name];
    cmd.app = app.add_subcommand(name, help);
    if (name == "selftest") continue;
    add_config_options(cmd);
    cmd.app->add_option("--out", cmd.out_dir, "output directory for CSV files")->required();
    if (name == "fig3") {
      cmd.app->add_option("--m-grid", cmd.m_grid, "BS antenna grid, e.g. 16,32,64 or 16:256:16");
      cmd.app->add_option("--p-grid", cmd.p_grid, "user antenna grid, e.g. 4,10");
    } else if (name == "fig4") {
      cmd.app->add_option("--power-grid", cmd.power_grid, "power grid [dBm], start:stop:step or a list");
    } else if (name == "fig5") {
      cmd.app->add_option("--m-grid", cmd.m_grid, "BS antenna grid");
    } else {
      cmd.app->add_option("--dump-channels", cmd.dump_trials, "write channel dumps of the first K trials")
          ->check(CLI::NonNegativeNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (cmds["selftest"].app->parsed()) {
      bool ok = true;
      for (const auto& c : mmcell::run_selftest()) {
        std::printf("%s %-28s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        ok = ok && c.passed;
      }
      return ok ? kOk : kNumeric;
    }

    mmcell::ExperimentResult result;
    for (auto& [name, cmd] : cmds) {
      if (!cmd.app->parsed()) continue;
      const unsigned workers = cmd.workers > 0 ? cmd.workers : mmcell::default_workers();
      if (name == "fig3") {
        const auto cfg = resolve_config(cmd, mmcell::fig3_config());
        mmcell::Fig3Grid grid;
        if (!cmd.m_grid.empty()) grid.bs_antennas = parse_int_grid(cmd.m_grid, "--m-grid");
        if (!cmd.p_grid.empty()) grid.user_antennas = parse_int_grid(cmd.p_grid, "--p-grid");
        result = mmcell::run_fig3(cfg, grid, workers);
      } else if (name == "fig4") {
        const auto cfg = resolve_config(cmd, mmcell::fig4_config());
        mmcell::Fig4Grid grid;
        if (!cmd.power_grid.empty()) grid.power_dbm = parse_grid(cmd.power_grid, "--power-grid");
        result = mmcell::run_fig4(cfg, grid, workers);
      } else if (name == "fig5") {
        const auto cfg = resolve_config(cmd, mmcell::fig5_config());
        mmcell::Fig5Grid grid;
        if (!cmd.m_grid.empty()) grid.bs_antennas = parse_int_grid(cmd.m_grid, "--m-grid");
        result = mmcell::run_fig5(cfg, grid, workers);
      } else if (name == "nmse") {
        const auto cfg = resolve_config(cmd, mmcell::ScenarioConfig{});
        result = mmcell::run_nmse(cfg, workers);
        dump_channels(cfg, cmd.dump_trials, cmd.out_dir, false);
      } else if (name == "rate") {
        const auto cfg = resolve_config(cmd, mmcell::ScenarioConfig{});
        result = mmcell::run_rate(cfg, workers);
        dump_channels(cfg, cmd.dump_trials, cmd.out_dir, true);
      }
      write(result, cmd.out_dir);
    }
    if (!all_finite(result)) {
      std::fprintf(stderr, "error: non-finite result\n");
      return kNumeric;
    }
    return kOk;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  }
}

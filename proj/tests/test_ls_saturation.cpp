#include <catch_amalgamated.hpp>

#include <cmath>

#include <mmcell/experiments.hpp>

using namespace mmcell;

TEST_CASE("LS baseline rate per log2 M decreases over M = 64..512", "[ls_saturation]") {
  ScenarioConfig cfg = fig5_config();
  cfg.trials = 60;
  Fig5Grid grid;
  grid.bs_antennas = {64, 128, 256, 512};
  const ExperimentResult r = run_fig5(cfg, grid, default_workers());
  double prev = INFINITY;
  for (const auto& row : r.rows) {
    const double ratio = row.extras[2] / std::log2(row.sweep_value);
    INFO("M = " << row.sweep_value << " LS rate " << row.extras[2] << " ratio " << ratio);
    CHECK(ratio < prev);
    prev = ratio;
  }
}

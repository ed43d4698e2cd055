// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "array_response.hpp"
#include "beamforming.hpp"
#include "downlink.hpp"
#include "experiments.hpp"
#include "random.hpp"
#include "trial.hpp"

namespace mmcell {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline double zf_identity_error(const CMatrix& rows, const ZfPrecoder& zf) {
  const CMatrix prod = rows * zf.w;
  return (prod - CMatrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff();
}

inline std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> checks;

  {
    double worst = 0.0;
    for (int n : {1, 2, 7, 64, 333, 1024}) worst = std::max(worst, std::abs(mean_array_gain(n) - 1.0));
    checks.push_back({"fejer_mean_gain", worst < 1e-9, "max |mean G_n - 1| = " + sci(worst)});
  }

  {
    double worst = 0.0;
    for (int n : {1, 3, 16, 255})
      for (double x : {-1.7, -0.31, 0.0, 0.004, 0.5, 1.0, 2.0, 3.3}) {
        cd direct{};
        for (int m = 0; m < n; ++m) direct += std::polar(1.0, kPi * m * x);
        worst = std::max(worst, std::abs(direct - dirichlet_sum(n, x)) / n);
      }
    checks.push_back({"dirichlet_closed_form", worst < 1e-10, "max relative deviation = " + sci(worst)});
  }

  {
    RandomStream rng(derive_seed(0, static_cast<std::uint64_t>(StreamKind::selftest)));
    double worst = 0.0;
    int rejected = 0;
    for (int t = 0; t < 100; ++t) {
      const CMatrix h = rng.complex_normal_matrix(10, 10, 1.0);
      const auto zf = zf_precoder(h);
      if (!zf) {
        ++rejected;
        continue;
      }
      worst = std::max(worst, zf_identity_error(h, *zf));
    }
    checks.push_back({"zf_exactness", worst < 1e-10 && rejected == 0,
                      "max |H W - I| = " + sci(worst) + ", rejected " + std::to_string(rejected)});
  }

  {
    ScenarioConfig cfg = fig4_config();
    double recon = 0.0;
    double zf_err = 0.0;
    for (std::uint64_t t = 0; t < 5; ++t) {
      const TrialOutcome o = run_trial(cfg, trial_seed(cfg.seed, t), {.rates = true});
      const double scale = o.estimate.h_eq_hat.cwiseAbs().maxCoeff();
      recon = std::max(recon, o.estimate.reconstruction_error() / scale);
      if (auto zf = zf_precoder(o.estimate.h_eq_hat)) zf_err = std::max(zf_err, zf_identity_error(o.estimate.h_eq_hat, *zf));
    }
    checks.push_back({"reconstruction_identity", recon < 1e-12, "max relative residual = " + sci(recon)});
    checks.push_back({"zf_exactness_on_estimates", zf_err < 1e-10, "max |H W - I| = " + sci(zf_err)});
  }
  return checks;
}

}  // namespace mmcell

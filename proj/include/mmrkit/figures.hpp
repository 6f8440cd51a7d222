#pragma once

#include <vector>

#include "mmrkit/io.hpp"
#include "mmrkit/mmr.hpp"
#include "mmrkit/regret.hpp"

namespace mmrkit {

struct FigureOptions {
  GridSpec rule_grid{-40.0, 40.0, 801};
  GridSpec gamma_grid{-30.0, 30.0, 601};
  GridSpec beta_grid{0.1, 5.0, 50};
  double breakdown_sigma = 1.0;
  std::vector<double> cost_levels{1.0, 5.0};
  GridSpec plugin_gamma_grid{-30.0, 30.0, 31};
  int plugin_mu2_points = 17;
  std::vector<double> plugin_x2{7.9, 9.0, 12.0, 20.0};
  QmcOptions qmc;
};

/// y1,d_linear,d_rt: the two MMR rules as functions of the nearest signal.
CsvTable fig1a_table(const MmrSolution& solution, const GridSpec& grid);

/// y1,difference with difference = d_linear - d_rt.
CsvTable fig1b_table(const MmrSolution& solution, const GridSpec& grid);

/// gamma,d_linear,d_rt,d_threshold0,d_coinflip profiled regret curves.
CsvTable fig2_table(const StudySet& study, const MmrSolution& solution, const GridSpec& grid);

/// beta_hat,k_tilde,k_bar.
CsvTable fig3_table(double sigma, const GridSpec& grid);

/// cost,c,gamma,d_threshold0,d_rt,d_linear in long format; cost is coded
/// 0 = constant, 1 = linear, 2 = quadratic.
CsvTable cost_panels_table(const StudySet& study, const MmrSolution& solution, const GridSpec& grid,
                           const std::vector<double>& levels);

/// x2,gamma,d_plugin,d_plugin_se,d_linear,d_rt. The study must have two
/// scalar-covariate signals; x2 replaces the farther one's covariate.
CsvTable plugin_panels_table(const StudySet& study, const FigureOptions& options);

}  // namespace mmrkit

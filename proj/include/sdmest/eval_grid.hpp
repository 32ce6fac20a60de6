#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sdmest/dataset.hpp"
#include "sdmest/mlp.hpp"

namespace sdmest {

struct MseReport {
  double mse = 0.0;  // dB^2
  double mae = 0.0;  // dB
  std::size_t n = 0;
};

/// Maps one raw sample to a dB estimate of one target.
using SampleEstimator = std::function<double(const Sample&)>;

/// Baselines, recomputed from the feature blocks (the eigenvalue features are
/// exactly 10*log10 of the equalizer eigenvalues, and likewise the SINRs).
double conventional_sigma_from_sample(const Sample& s);
double conventional_snr_from_sample(const Sample& s);

SampleEstimator make_nn_estimator(const MlpParams& params);

/// Mean squared / absolute error of an estimator over raw samples; the sign
/// convention everywhere is actual - estimated.
MseReport evaluate_mse(const SampleEstimator& estimator, const Dataset& raw,
                       Target target);

struct GridCellStats {
  double mean_signed_db = 0.0;
  double mean_abs_db = 0.0;
  std::size_t count = 0;
  bool sparse = false;
};

struct ErrorGrid {
  std::vector<double> sigma_axis_db;  // bin centers, ascending
  std::vector<double> snr_axis_db;    // bin centers, ascending
  std::vector<GridCellStats> cells;   // row-major: sigma index * n_snr + snr index
  std::string estimator_id;           // "conventional" | "nn"
  Target target = Target::kSigmaMdg;

  const GridCellStats& at(std::size_t i_sigma, std::size_t i_snr) const {
    return cells[i_sigma * snr_axis_db.size() + i_snr];
  }
};

struct GridEstimator {
  std::string estimator_id;
  Target target;
  SampleEstimator fn;
};

struct GridConfig {
  std::vector<double> sigma_centers_db;  // default 0.5 .. 6.0 step 0.5
  std::vector<double> snr_centers_db;    // default 5 .. 22 step 1
  int channels_per_cell = 50;
  double sigma_halfwidth_db = 0.25;  // rejection window around each center
  std::size_t min_cell_count = 10;
  LinkConfig link;
  std::optional<double> sinr_imp_db;

  static std::vector<double> default_sigma_centers();
  static std::vector<double> default_snr_centers();
  void validate() const;
};

/// Evaluates all estimators on shared per-cell channel ensembles. Channel
/// seeds live in the evaluation namespace, disjoint from training seeds by
/// construction. Returns one grid per estimator, in input order.
std::vector<ErrorGrid> error_grids(const std::vector<GridEstimator>& estimators,
                                   const GridConfig& cfg,
                                   const MdgCalibrationCurve& curve,
                                   std::uint64_t master_seed);

/// CSV: sigma_mdg_db,snr_db,mean_signed_error_db,mean_abs_error_db,count
void write_grid_csv(const ErrorGrid& grid, const std::filesystem::path& path);

struct LabeledMse {
  std::string estimator_id;
  Target target;
  MseReport report;
};

/// Writes the machine-readable comparison summary (JSON) next to per-grid
/// CSVs; includes pass/fail verdicts against the fixed acceptance thresholds.
void compare_report(const std::vector<ErrorGrid>& grids,
                    const std::vector<LabeledMse>& mse_results,
                    const std::filesystem::path& summary_path);

}  // namespace sdmest

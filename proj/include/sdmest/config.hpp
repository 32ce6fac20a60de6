#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdmest/dataset.hpp"
#include "sdmest/eval_grid.hpp"
#include "sdmest/mlp.hpp"

namespace sdmest {

/// Command-line / configuration mistakes; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  std::vector<double> sigma_targets_db{0.0, 3.0, 6.0};
  std::vector<double> snr_values_db{5.0, 10.0, 20.0};
  std::size_t n_symbols = 200000;
  int channels_per_cell = 2;
  double max_deviation_db = 0.15;
  std::optional<double> sinr_imp_db;
};

/// Everything a run needs, read from a flat key = value config file with
/// optional flag overrides. Keys are documented in the README; unknown keys
/// are rejected.
struct RunConfig {
  std::optional<std::uint64_t> master_seed;  // required before running
  std::filesystem::path out_dir;

  LinkConfig link;
  int dataset_n_channels = 615;
  double dataset_sigma_low_db = 0.2;
  double dataset_sigma_high_db = 6.2;
  std::vector<double> dataset_snr_values_db =
      DatasetConfig::default_snr_values();
  std::optional<double> dataset_sinr_imp_db;
  double dataset_train_fraction = 0.9;

  TrainConfig train;

  std::vector<double> grid_sigma_centers_db =
      GridConfig::default_sigma_centers();
  std::vector<double> grid_snr_centers_db = GridConfig::default_snr_centers();
  int grid_channels_per_cell = 50;
  double grid_sigma_halfwidth_db = 0.25;
  std::size_t grid_min_cell_count = 10;

  OracleConfig oracle;

  std::uint64_t seed() const;  // throws UsageError when unset
  DatasetConfig dataset_config() const;
  GridConfig grid_config() const;
};

/// Parses `key = value` lines; '#' starts a comment; blank lines ignored.
/// Unknown keys throw UsageError naming the key.
RunConfig parse_config_file(const std::filesystem::path& path);
void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value);

}  // namespace sdmest

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sdmest/channel.hpp"
#include "sdmest/mmse.hpp"

namespace sdmest {

inline constexpr int kNumFeatures = 12;

/// One labeled record: 6 equalizer eigenvalues (dB, descending) followed by
/// 6 per-stream SINRs (dB, descending), plus the labels and enough metadata
/// to regenerate the channel.
struct Sample {
  std::array<double, kNumFeatures> features{};
  double label_sigma_mdg_db = 0.0;
  double label_snr_db = 0.0;
  std::uint64_t channel_seed = 0;
  int num_sections = 0;
};

struct DatasetConfig {
  int n_channels = 615;
  double sigma_low_db = 0.2;
  double sigma_high_db = 6.2;
  std::vector<double> snr_values_db;  // defaults to 20 uniform points 5..22
  LinkConfig link;
  std::optional<double> sinr_imp_db;
  std::uint64_t master_seed = 0;
  double train_fraction = 0.9;

  static std::vector<double> default_snr_values();
  void validate() const;
};

/// Converts linear eigenvalue/SINR vectors to dB, sorts each block
/// descending, and concatenates eigenvalues-then-SINRs. Inputs must both
/// have 6 positive entries.
std::array<double, kNumFeatures> build_features(
    const std::vector<double>& eq_eigs_linear,
    const std::vector<double>& sinr_linear);

/// Feature vector of one channel at one SNR point (equalizer run at the
/// effective SNR of p).
std::array<double, kNumFeatures> features_for_channel(const CMat& h,
                                                      const SnrPoint& p);

/// Generates n_channels x |snr_values| samples. Per-channel MDG targets are
/// spread uniformly over [sigma_low, sigma_high]; realized channels are
/// redrawn until their sigma_mdg lies inside the configured range, so labels
/// always respect it. Deterministic in cfg.master_seed.
std::vector<Sample> generate_dataset(const DatasetConfig& cfg);
std::vector<Sample> generate_dataset(const DatasetConfig& cfg,
                                     const MdgCalibrationCurve& curve);

struct StandardizationStats {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> std_dev{};
};

/// A sample set whose features are either raw (as generated) or standardized
/// against some StandardizationStats; the flag guards against applying the
/// transform twice.
struct Dataset {
  std::vector<Sample> samples;
  bool standardized = false;
};

struct Split {
  Dataset train_raw;
  Dataset test_raw;
  StandardizationStats stats;  // computed on the training split only
};

/// Seeded shuffle followed by a train/test split; statistics come from the
/// training rows only. Throws when a feature has zero variance (the message
/// names the feature index) or when fewer than 10 samples are supplied.
Split split_dataset(const std::vector<Sample>& samples, double train_fraction,
                    std::uint64_t seed);

void standardize_in_place(Dataset& ds, const StandardizationStats& stats);
Dataset standardized_copy(const Dataset& raw, const StandardizationStats& stats);

/// Spec'd convenience wrapper: returns standardized train/test plus stats.
struct StandardizedSplit {
  Dataset train;
  Dataset test;
  StandardizationStats stats;
};
StandardizedSplit split_and_standardize(const std::vector<Sample>& samples,
                                        const DatasetConfig& cfg);

/// CSV round trip, lossless at 17 significant digits. Fixed header:
/// channel_seed,K,label_sigma_mdg_db,label_snr_db,eig_db_1..6,sinr_db_1..6
void save_dataset(const std::vector<Sample>& samples,
                  const std::filesystem::path& path);
std::vector<Sample> load_dataset(const std::filesystem::path& path);

}  // namespace sdmest

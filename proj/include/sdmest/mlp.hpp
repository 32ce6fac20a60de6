#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdmest/dataset.hpp"

namespace sdmest {

enum class Target { kSigmaMdg, kSnr };

std::string target_name(Target t);
Target target_from_name(const std::string& name);

/// One 12-6-1 regression network with tanh hidden units and a linear output,
/// carrying the feature standardization it was trained with.
struct MlpParams {
  std::array<std::array<double, kNumFeatures>, 6> w1{};
  std::array<double, 6> b1{};
  std::array<double, 6> w2{};
  double b2 = 0.0;
  std::string activation = "tanh";
  StandardizationStats stats;
  Target target = Target::kSigmaMdg;
  std::string train_fingerprint;
};

struct MlpGradients {
  std::array<std::array<double, kNumFeatures>, 6> w1{};
  std::array<double, 6> b1{};
  std::array<double, 6> w2{};
  double b2 = 0.0;
};

struct TrainConfig {
  int epochs = 500;
  int batch_size = 5;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t init_seed = 0;

  void validate() const;
  std::string fingerprint() const;
};

struct TrainHistory {
  std::vector<double> train_loss;    // mean squared error per epoch, dB^2
  std::vector<double> holdout_loss;  // evaluated on the held-out set
};

/// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero biases.
MlpParams init_params(std::uint64_t seed, Target target,
                      const StandardizationStats& stats);

/// Forward pass on an already-standardized feature vector.
double forward(const MlpParams& p, std::span<const double, kNumFeatures> f);

/// Exact gradient of the per-sample squared error (pred - target)^2.
MlpGradients backward(const MlpParams& p,
                      std::span<const double, kNumFeatures> f,
                      double target_value);

/// Mini-batch Adam on mean squared error. Both sets must be standardized;
/// only the label selected by `target` is ever read. Deterministic given
/// (init_seed, shuffle_seed). Aborts when the loss diverges (above 10x the
/// first epoch's loss for 10 consecutive epochs).
std::pair<MlpParams, TrainHistory> train(const Dataset& train_set,
                                         const Dataset& holdout_set,
                                         const StandardizationStats& stats,
                                         const TrainConfig& cfg, Target target);

/// Public inference entry point: standardizes raw features with the stored
/// stats, then runs forward.
double predict(const MlpParams& p, std::span<const double> raw_features);

/// JSON round trip of weights, stats, target tag, and training fingerprint.
/// Numbers carry 17 significant digits, so reload reproduces outputs exactly.
void save_model(const MlpParams& p, const std::filesystem::path& path);
MlpParams load_model(const std::filesystem::path& path);

double mse_loss(const MlpParams& p, const Dataset& standardized, Target target);

}  // namespace sdmest

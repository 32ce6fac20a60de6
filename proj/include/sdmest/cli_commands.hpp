#pragma once

#include <filesystem>
#include <optional>

#include "sdmest/config.hpp"

namespace sdmest {

/// Flag overrides shared by all subcommands; flags win over config values,
/// and the SDMEST_OUT_DIR environment variable supplies the output directory
/// only when neither source sets one.
struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  bool force = false;
  bool strict = false;
};

void resolve(RunConfig& cfg, const CommonFlags& flags);

int cmd_generate(RunConfig cfg, const CommonFlags& flags);
int cmd_train(RunConfig cfg, const CommonFlags& flags,
              const std::filesystem::path& dataset_path, Target target);
int cmd_evaluate(RunConfig cfg, const CommonFlags& flags,
                 const std::filesystem::path& dataset_path,
                 const std::optional<std::filesystem::path>& model_sigma,
                 const std::optional<std::filesystem::path>& model_snr);
int cmd_grid(RunConfig cfg, const CommonFlags& flags,
             const std::filesystem::path& model_sigma,
             const std::filesystem::path& model_snr);
int cmd_oracle_check(RunConfig cfg, const CommonFlags& flags);

/// FNV-1a 64-bit content hash, hex-encoded; used in run manifests.
std::string fnv1a64_file_hex(const std::filesystem::path& path);

}  // namespace sdmest

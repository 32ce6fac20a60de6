#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdmest/cli_commands.hpp"

namespace {

// Exit codes are a stable contract: 0 success, 1 failure, 2 usage error.
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

sdmest::Target parse_target(const std::string& s) {
  if (s == "sigma-mdg") return sdmest::Target::kSigmaMdg;
  if (s == "snr") return sdmest::Target::kSnr;
  throw sdmest::UsageError("--target must be sigma-mdg or snr, got '" + s +
                           "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sdmest: joint MDG / optical-SNR estimation for coupled SDM links\n"
      "Pipeline: generate -> train -> evaluate | grid, plus a symbol-level\n"
      "oracle-check of the closed-form SINR model."};
  app.require_subcommand(1);

  std::string config_path;
  sdmest::CommonFlags flags;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file")
        ->required();
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { flags.seed = v; },
        "override master_seed");
    sub->add_option_function<std::string>(
        "--out", [&](const std::string& v) { flags.out = v; },
        "override output directory");
    sub->add_flag("--force", flags.force, "overwrite existing outputs");
  };

  CLI::App* generate = app.add_subcommand(
      "generate", "generate the labeled analytic dataset (CSV + manifest)");
  add_common(generate);

  CLI::App* train = app.add_subcommand(
      "train", "train one regression network on a generated dataset");
  add_common(train);
  std::string train_dataset, train_target;
  train->add_option("--dataset", train_dataset, "dataset CSV path")->required();
  train->add_option("--target", train_target, "sigma-mdg | snr")->required();

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "held-out MSE of trained models against their labels");
  add_common(evaluate);
  std::string eval_dataset;
  std::string eval_model_sigma, eval_model_snr;
  evaluate->add_option("--dataset", eval_dataset, "dataset CSV path")
      ->required();
  evaluate->add_option("--model-sigma", eval_model_sigma,
                       "sigma_mdg model JSON");
  evaluate->add_option("--model-snr", eval_model_snr, "snr model JSON");
  evaluate->add_flag("--strict", flags.strict,
                     "exit nonzero when an MSE threshold fails");

  CLI::App* grid = app.add_subcommand(
      "grid", "error surfaces over the (sigma_mdg, SNR) plane, four CSVs");
  add_common(grid);
  std::string grid_model_sigma, grid_model_snr;
  grid->add_option("--model-sigma", grid_model_sigma, "sigma_mdg model JSON")
      ->required();
  grid->add_option("--model-snr", grid_model_snr, "snr model JSON")
      ->required();

  CLI::App* oracle = app.add_subcommand(
      "oracle-check",
      "symbol-level Monte Carlo validation of the closed-form SINRs");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (dynamic_cast<const CLI::CallForHelp*>(&e) != nullptr ||
        dynamic_cast<const CLI::CallForAllHelp*>(&e) != nullptr ||
        dynamic_cast<const CLI::CallForVersion*>(&e) != nullptr)
      return 0;
    (void)code;
    return kExitUsage;
  }

  try {
    const sdmest::RunConfig cfg = sdmest::parse_config_file(config_path);
    if (generate->parsed()) return sdmest::cmd_generate(cfg, flags);
    if (train->parsed())
      return sdmest::cmd_train(cfg, flags, train_dataset,
                               parse_target(train_target));
    if (evaluate->parsed()) {
      std::optional<std::filesystem::path> ms, mn;
      if (!eval_model_sigma.empty()) ms = eval_model_sigma;
      if (!eval_model_snr.empty()) mn = eval_model_snr;
      return sdmest::cmd_evaluate(cfg, flags, eval_dataset, ms, mn);
    }
    if (grid->parsed())
      return sdmest::cmd_grid(cfg, flags, grid_model_sigma, grid_model_snr);
    if (oracle->parsed()) return sdmest::cmd_oracle_check(cfg, flags);
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const sdmest::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

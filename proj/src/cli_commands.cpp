#include "sdmest/cli_commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "sdmest/signal_oracle.hpp"

namespace sdmest {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_writable(const fs::path& p, bool force) {
  if (fs::exists(p) && !force)
    throw std::runtime_error("refusing to overwrite existing '" + p.string() +
                             "' (pass --force to allow)");
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["master_seed"] = cfg.seed();
  j["out_dir"] = cfg.out_dir.string();
  j["link.num_modes"] = cfg.link.num_modes;
  j["link.num_sections"] = cfg.link.num_sections;
  j["link.normalize_power"] = cfg.link.normalize_power;
  j["dataset.n_channels"] = cfg.dataset_n_channels;
  j["dataset.sigma_low_db"] = cfg.dataset_sigma_low_db;
  j["dataset.sigma_high_db"] = cfg.dataset_sigma_high_db;
  j["dataset.snr_values_db"] = cfg.dataset_snr_values_db;
  if (cfg.dataset_sinr_imp_db.has_value())
    j["dataset.sinr_imp_db"] = *cfg.dataset_sinr_imp_db;
  j["dataset.train_fraction"] = cfg.dataset_train_fraction;
  j["train.epochs"] = cfg.train.epochs;
  j["train.batch_size"] = cfg.train.batch_size;
  j["train.learning_rate"] = cfg.train.learning_rate;
  j["train.adam_beta1"] = cfg.train.adam_beta1;
  j["train.adam_beta2"] = cfg.train.adam_beta2;
  j["train.adam_epsilon"] = cfg.train.adam_epsilon;
  j["grid.sigma_centers_db"] = cfg.grid_sigma_centers_db;
  j["grid.snr_centers_db"] = cfg.grid_snr_centers_db;
  j["grid.channels_per_cell"] = cfg.grid_channels_per_cell;
  j["grid.sigma_halfwidth_db"] = cfg.grid_sigma_halfwidth_db;
  j["grid.min_cell_count"] = cfg.grid_min_cell_count;
  j["oracle.sigma_targets_db"] = cfg.oracle.sigma_targets_db;
  j["oracle.snr_values_db"] = cfg.oracle.snr_values_db;
  j["oracle.n_symbols"] = cfg.oracle.n_symbols;
  j["oracle.channels_per_cell"] = cfg.oracle.channels_per_cell;
  j["oracle.max_deviation_db"] = cfg.oracle.max_deviation_db;
  if (cfg.oracle.sinr_imp_db.has_value())
    j["oracle.sinr_imp_db"] = *cfg.oracle.sinr_imp_db;
  return j;
}

void write_json(const nlohmann::ordered_json& j, const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + p.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

MlpParams load_model_checked(const fs::path& path, Target expected) {
  if (!fs::exists(path))
    throw UsageError("model file '" + path.string() + "' does not exist");
  MlpParams p = load_model(path);
  if (p.target != expected)
    throw UsageError("model '" + path.string() + "' is tagged for target '" +
                     target_name(p.target) + "', not '" +
                     target_name(expected) + "'");
  return p;
}

std::vector<Sample> load_dataset_checked(const fs::path& path) {
  if (!fs::exists(path))
    throw UsageError("dataset file '" + path.string() + "' does not exist");
  return load_dataset(path);
}

}  // namespace

void resolve(RunConfig& cfg, const CommonFlags& flags) {
  if (flags.seed.has_value()) cfg.master_seed = *flags.seed;
  if (flags.out.has_value()) cfg.out_dir = *flags.out;
  if (cfg.out_dir.empty()) {
    if (const char* env = std::getenv("SDMEST_OUT_DIR"))
      cfg.out_dir = env;
    else
      cfg.out_dir = ".";
  }
}

std::string fnv1a64_file_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("fnv1a64: cannot open '" + path.string() + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

int cmd_generate(RunConfig cfg, const CommonFlags& flags) {
  resolve(cfg, flags);
  const DatasetConfig dcfg = cfg.dataset_config();
  dcfg.validate();

  const fs::path csv = cfg.out_dir / "dataset.csv";
  const fs::path manifest = cfg.out_dir / "dataset_manifest.json";
  ensure_writable(csv, flags.force);
  ensure_writable(manifest, flags.force);

  const std::vector<Sample> samples = generate_dataset(dcfg);
  save_dataset(samples, csv);

  nlohmann::ordered_json j;
  j["config"] = config_echo(cfg);
  j["dataset_file"] = csv.filename().string();
  j["rows"] = samples.size();
  j["fnv1a64"] = fnv1a64_file_hex(csv);
  write_json(j, manifest);

  std::cout << "wrote " << samples.size() << " samples to " << csv.string()
            << " (fnv1a64 " << j["fnv1a64"].get<std::string>() << ")\n";
  return 0;
}

int cmd_train(RunConfig cfg, const CommonFlags& flags,
              const fs::path& dataset_path, Target target) {
  resolve(cfg, flags);
  const std::uint64_t master = cfg.seed();
  const std::vector<Sample> samples = load_dataset_checked(dataset_path);

  const std::string tname = target_name(target);
  const fs::path model_path = cfg.out_dir / ("model_" + tname + ".json");
  const fs::path hist_path = cfg.out_dir / ("history_" + tname + ".csv");
  ensure_writable(model_path, flags.force);
  ensure_writable(hist_path, flags.force);

  Split split = split_dataset(samples, cfg.dataset_train_fraction,
                              derive_seed(master, {seed_tag::kSplit}));
  const Dataset train_std = standardized_copy(split.train_raw, split.stats);
  const Dataset test_std = standardized_copy(split.test_raw, split.stats);

  TrainConfig tcfg = cfg.train;
  const std::uint64_t tidx = target == Target::kSigmaMdg ? 0 : 1;
  tcfg.init_seed = derive_seed(master, {seed_tag::kMlpInit, tidx});
  tcfg.shuffle_seed = derive_seed(master, {seed_tag::kMlpShuffle, tidx});

  auto [params, history] = train(train_std, test_std, split.stats, tcfg, target);
  save_model(params, model_path);

  std::ofstream hist(hist_path, std::ios::binary);
  if (!hist)
    throw std::runtime_error("cannot open '" + hist_path.string() + "'");
  hist << "epoch,train_mse_db2,holdout_mse_db2\n";
  for (std::size_t e = 0; e < history.train_loss.size(); ++e)
    hist << (e + 1) << ',' << fmt17(history.train_loss[e]) << ','
         << fmt17(history.holdout_loss[e]) << '\n';
  if (!hist)
    throw std::runtime_error("write failed for '" + hist_path.string() + "'");

  std::cout << "trained " << tname << " model: final train MSE "
            << history.train_loss.back() << " dB^2, holdout MSE "
            << history.holdout_loss.back() << " dB^2 -> "
            << model_path.string() << "\n";
  return 0;
}

int cmd_evaluate(RunConfig cfg, const CommonFlags& flags,
                 const fs::path& dataset_path,
                 const std::optional<fs::path>& model_sigma,
                 const std::optional<fs::path>& model_snr) {
  resolve(cfg, flags);
  if (!model_sigma.has_value() && !model_snr.has_value())
    throw UsageError("evaluate: pass --model-sigma and/or --model-snr");
  const std::uint64_t master = cfg.seed();
  const std::vector<Sample> samples = load_dataset_checked(dataset_path);

  const fs::path metrics_path = cfg.out_dir / "metrics.json";
  ensure_writable(metrics_path, flags.force);

  Split split = split_dataset(samples, cfg.dataset_train_fraction,
                              derive_seed(master, {seed_tag::kSplit}));

  nlohmann::ordered_json j;
  j["dataset"] = dataset_path.filename().string();
  j["dataset_fnv1a64"] = fnv1a64_file_hex(dataset_path);
  j["n_test"] = split.test_raw.samples.size();
  j["strict"] = flags.strict;
  bool all_pass = true;

  const auto emit = [&](const std::string& key, Target t,
                        const SampleEstimator& fn, double threshold) {
    const MseReport r = evaluate_mse(fn, split.test_raw, t);
    nlohmann::ordered_json e;
    e["mse_db2"] = r.mse;
    e["mae_db"] = r.mae;
    e["n"] = r.n;
    if (threshold > 0.0) {
      e["mse_threshold_db2"] = threshold;
      e["pass"] = r.mse <= threshold;
      if (r.mse > threshold) all_pass = false;
    }
    j[key] = e;
  };

  if (model_sigma.has_value()) {
    const MlpParams p = load_model_checked(*model_sigma, Target::kSigmaMdg);
    emit("nn_sigma_mdg", Target::kSigmaMdg, make_nn_estimator(p), 0.05);
  }
  if (model_snr.has_value()) {
    const MlpParams p = load_model_checked(*model_snr, Target::kSnr);
    emit("nn_snr", Target::kSnr, make_nn_estimator(p), 1.0);
  }
  // Baselines from the same held-out rows, for side-by-side context.
  emit("conventional_sigma_mdg", Target::kSigmaMdg,
       conventional_sigma_from_sample, 0.0);
  emit("conventional_snr", Target::kSnr, conventional_snr_from_sample, 0.0);

  j["all_pass"] = all_pass;
  write_json(j, metrics_path);
  std::cout << j.dump(2) << '\n';
  return (flags.strict && !all_pass) ? 1 : 0;
}

int cmd_grid(RunConfig cfg, const CommonFlags& flags,
             const fs::path& model_sigma, const fs::path& model_snr) {
  resolve(cfg, flags);
  const std::uint64_t master = cfg.seed();
  const MlpParams psig = load_model_checked(model_sigma, Target::kSigmaMdg);
  const MlpParams psnr = load_model_checked(model_snr, Target::kSnr);

  const GridConfig gcfg = cfg.grid_config();
  gcfg.validate();

  const fs::path summary_path = cfg.out_dir / "grid_summary.json";
  const std::vector<std::pair<std::string, std::string>> names = {
      {"conventional", "sigma_mdg"},
      {"nn", "sigma_mdg"},
      {"conventional", "snr"},
      {"nn", "snr"}};
  std::vector<fs::path> csv_paths;
  for (const auto& [est, tgt] : names)
    csv_paths.push_back(cfg.out_dir / ("grid_" + est + "_" + tgt + ".csv"));
  ensure_writable(summary_path, flags.force);
  for (const fs::path& p : csv_paths) ensure_writable(p, flags.force);

  const MdgCalibrationCurve curve = MdgCalibrationCurve::build(
      cfg.link.num_sections, cfg.link.dim(),
      derive_seed(master, {seed_tag::kCalibration}),
      gcfg.sigma_centers_db.back() + gcfg.sigma_halfwidth_db);

  const std::vector<GridEstimator> estimators = {
      {"conventional", Target::kSigmaMdg, conventional_sigma_from_sample},
      {"nn", Target::kSigmaMdg, make_nn_estimator(psig)},
      {"conventional", Target::kSnr, conventional_snr_from_sample},
      {"nn", Target::kSnr, make_nn_estimator(psnr)}};

  const std::vector<ErrorGrid> grids =
      error_grids(estimators, gcfg, curve, master);
  for (std::size_t i = 0; i < grids.size(); ++i)
    write_grid_csv(grids[i], csv_paths[i]);
  compare_report(grids, {}, summary_path);

  std::cout << "wrote " << grids.size() << " grids and "
            << summary_path.string() << "\n";
  return 0;
}

int cmd_oracle_check(RunConfig cfg, const CommonFlags& flags) {
  resolve(cfg, flags);
  const std::uint64_t master = cfg.seed();
  const OracleConfig& ocfg = cfg.oracle;
  if (ocfg.n_symbols < 1000)
    throw UsageError("oracle-check: oracle.n_symbols must be >= 1000");
  if (ocfg.channels_per_cell < 1)
    throw UsageError("oracle-check: oracle.channels_per_cell must be >= 1");

  const fs::path report_path = cfg.out_dir / "oracle_report.json";
  ensure_writable(report_path, flags.force);

  LinkConfig link = cfg.link;
  double worst = 0.0;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t is = 0; is < ocfg.sigma_targets_db.size(); ++is) {
    const double target = ocfg.sigma_targets_db[is];
    link.sigma_g =
        target == 0.0
            ? 0.0
            : calibrate_sigma_g(target, link.num_sections, link.dim(),
                                derive_seed(master, {seed_tag::kCalibration,
                                                     is}));
    for (std::size_t iq = 0; iq < ocfg.snr_values_db.size(); ++iq) {
      const double snr_db = ocfg.snr_values_db[iq];
      double cell_worst = 0.0;
      for (int c = 0; c < ocfg.channels_per_cell; ++c) {
        const std::uint64_t chan_seed = derive_seed(
            master, {seed_tag::kOracle, is, iq, static_cast<std::uint64_t>(c),
                     0});
        const std::uint64_t sim_seed = derive_seed(
            master, {seed_tag::kOracle, is, iq, static_cast<std::uint64_t>(c),
                     1});
        const ChannelRealization ch = generate_channel(link, chan_seed);
        const double dev = oracle_check_max_deviation_db(
            ch.h, SnrPoint{snr_db, ocfg.sinr_imp_db}, ocfg.n_symbols,
            sim_seed);
        cell_worst = std::max(cell_worst, dev);
      }
      worst = std::max(worst, cell_worst);
      std::printf("sigma_mdg %5.2f dB  snr %5.2f dB  max deviation %.4f dB\n",
                  target, snr_db, cell_worst);
      nlohmann::ordered_json cell;
      cell["sigma_target_db"] = target;
      cell["snr_db"] = snr_db;
      cell["max_deviation_db"] = cell_worst;
      cells.push_back(cell);
    }
  }
  const bool pass = worst <= ocfg.max_deviation_db;
  std::printf("overall max deviation %.4f dB (threshold %.2f dB): %s\n", worst,
              ocfg.max_deviation_db, pass ? "PASS" : "FAIL");

  nlohmann::ordered_json j;
  j["cells"] = cells;
  j["max_deviation_db"] = worst;
  j["threshold_db"] = ocfg.max_deviation_db;
  j["pass"] = pass;
  write_json(j, report_path);
  return pass ? 0 : 1;
}

}  // namespace sdmest

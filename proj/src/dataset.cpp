#include "sdmest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sdmest {

std::vector<double> DatasetConfig::default_snr_values() {
  std::vector<double> v(20);
  for (int i = 0; i < 20; ++i) v[i] = 5.0 + 17.0 * double(i) / 19.0;
  return v;
}

void DatasetConfig::validate() const {
  link.validate();
  if (n_channels < 1)
    throw std::invalid_argument("DatasetConfig: n_channels must be >= 1");
  if (!(sigma_low_db >= 0.0) || !(sigma_high_db > sigma_low_db))
    throw std::invalid_argument(
        "DatasetConfig: need 0 <= sigma_low_db < sigma_high_db");
  if (snr_values_db.empty())
    throw std::invalid_argument("DatasetConfig: snr_values_db is empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument(
        "DatasetConfig: train_fraction must be in (0, 1)");
  if (link.dim() != 6)
    throw std::invalid_argument(
        "DatasetConfig: feature layout requires 6 streams (3 spatial modes)");
}

std::array<double, kNumFeatures> build_features(
    const std::vector<double>& eq_eigs_linear,
    const std::vector<double>& sinr_linear) {
  if (eq_eigs_linear.size() != 6 || sinr_linear.size() != 6)
    throw std::invalid_argument("build_features: expected 6 + 6 inputs");
  std::array<double, kNumFeatures> f{};
  for (int i = 0; i < 6; ++i) {
    if (!(eq_eigs_linear[i] > 0.0) || !(sinr_linear[i] > 0.0))
      throw std::invalid_argument("build_features: inputs must be positive");
    f[i] = linear_to_db(eq_eigs_linear[i]);
    f[6 + i] = linear_to_db(sinr_linear[i]);
  }
  std::sort(f.begin(), f.begin() + 6, std::greater<>());
  std::sort(f.begin() + 6, f.end(), std::greater<>());
  return f;
}

std::array<double, kNumFeatures> features_for_channel(const CMat& h,
                                                      const SnrPoint& p) {
  const double s = effective_snr_linear(p);
  const std::vector<double> eigs = equalizer_eigenvalues(mmse_matrix(h, s));
  const std::vector<double> sinr = sinr_per_stream(h, p);
  return build_features(eigs, sinr);
}

namespace {

// Draws channels until the realized sigma_mdg falls inside [low, high]; the
// accepted channel is reproducible from its own seed alone.
ChannelRealization draw_channel_in_range(const LinkConfig& link,
                                         double sigma_g, double low,
                                         double high, std::uint64_t master,
                                         std::uint64_t tag,
                                         std::uint64_t index) {
  LinkConfig cfg = link;
  cfg.sigma_g = sigma_g;
  constexpr std::uint64_t kMaxAttempts = 1000;
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::uint64_t seed = derive_seed(master, {tag, index, attempt});
    ChannelRealization ch = generate_channel(cfg, seed);
    if (ch.sigma_mdg_db >= low && ch.sigma_mdg_db <= high) return ch;
  }
  throw std::runtime_error(
      "draw_channel_in_range: no draw landed in [" + std::to_string(low) +
      ", " + std::to_string(high) + "] dB after 1000 attempts");
}

}  // namespace

std::vector<Sample> generate_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  const MdgCalibrationCurve curve = MdgCalibrationCurve::build(
      cfg.link.num_sections, cfg.link.dim(),
      derive_seed(cfg.master_seed, {seed_tag::kCalibration}),
      cfg.sigma_high_db);
  return generate_dataset(cfg, curve);
}

std::vector<Sample> generate_dataset(const DatasetConfig& cfg,
                                     const MdgCalibrationCurve& curve) {
  cfg.validate();
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(cfg.n_channels) *
                  cfg.snr_values_db.size());

  for (int c = 0; c < cfg.n_channels; ++c) {
    const double target =
        cfg.n_channels == 1
            ? 0.5 * (cfg.sigma_low_db + cfg.sigma_high_db)
            : cfg.sigma_low_db + (cfg.sigma_high_db - cfg.sigma_low_db) *
                                     double(c) / double(cfg.n_channels - 1);
    double sigma_g = 0.0;
    try {
      sigma_g = curve.sigma_g_for(target);
    } catch (const std::exception& e) {
      throw std::runtime_error("generate_dataset: calibration failed for "
                               "target " +
                               std::to_string(target) + " dB: " + e.what());
    }
    const ChannelRealization ch = draw_channel_in_range(
        cfg.link, sigma_g, cfg.sigma_low_db, cfg.sigma_high_db,
        cfg.master_seed, seed_tag::kTrainChannels,
        static_cast<std::uint64_t>(c));

    for (double snr_db : cfg.snr_values_db) {
      Sample s;
      s.features = features_for_channel(ch.h, SnrPoint{snr_db, cfg.sinr_imp_db});
      s.label_sigma_mdg_db = ch.sigma_mdg_db;
      s.label_snr_db = snr_db;
      s.channel_seed = ch.seed;
      s.num_sections = cfg.link.num_sections;
      samples.push_back(s);
    }
  }
  return samples;
}

Split split_dataset(const std::vector<Sample>& samples, double train_fraction,
                    std::uint64_t seed) {
  if (samples.size() < 10)
    throw std::invalid_argument("split_dataset: need at least 10 samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split_dataset: train_fraction not in (0, 1)");

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  // Fisher-Yates with our own stream, for cross-platform reproducibility.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform01() * double(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }

  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(train_fraction * samples.size()));
  Split out;
  out.train_raw.samples.reserve(n_train);
  out.test_raw.samples.reserve(samples.size() - n_train);
  for (std::size_t k = 0; k < order.size(); ++k)
    (k < n_train ? out.train_raw : out.test_raw)
        .samples.push_back(samples[order[k]]);

  for (int f = 0; f < kNumFeatures; ++f) {
    double mean = 0.0;
    for (const Sample& s : out.train_raw.samples) mean += s.features[f];
    mean /= double(out.train_raw.samples.size());
    double var = 0.0;
    for (const Sample& s : out.train_raw.samples)
      var += (s.features[f] - mean) * (s.features[f] - mean);
    var /= double(out.train_raw.samples.size());
    if (!(var > 1e-24))
      throw std::runtime_error(
          "split_dataset: feature " + std::to_string(f) +
          " has zero variance on the training split");
    out.stats.mean[f] = mean;
    out.stats.std_dev[f] = std::sqrt(var);
  }
  return out;
}

void standardize_in_place(Dataset& ds, const StandardizationStats& stats) {
  if (ds.standardized)
    throw std::logic_error(
        "standardize_in_place: dataset is already standardized");
  for (Sample& s : ds.samples)
    for (int f = 0; f < kNumFeatures; ++f)
      s.features[f] = (s.features[f] - stats.mean[f]) / stats.std_dev[f];
  ds.standardized = true;
}

Dataset standardized_copy(const Dataset& raw,
                          const StandardizationStats& stats) {
  Dataset ds = raw;
  standardize_in_place(ds, stats);
  return ds;
}

StandardizedSplit split_and_standardize(const std::vector<Sample>& samples,
                                        const DatasetConfig& cfg) {
  Split split = split_dataset(samples, cfg.train_fraction,
                              derive_seed(cfg.master_seed, {seed_tag::kSplit}));
  StandardizedSplit out;
  out.stats = split.stats;
  out.train = standardized_copy(split.train_raw, split.stats);
  out.test = standardized_copy(split.test_raw, split.stats);
  return out;
}

namespace {

constexpr const char* kCsvHeader =
    "channel_seed,K,label_sigma_mdg_db,label_snr_db,"
    "eig_db_1,eig_db_2,eig_db_3,eig_db_4,eig_db_5,eig_db_6,"
    "sinr_db_1,sinr_db_2,sinr_db_3,sinr_db_4,sinr_db_5,sinr_db_6";

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("load_dataset: malformed number '" + tok +
                             "' on line " + std::to_string(line_no));
  }
}

}  // namespace

void save_dataset(const std::vector<Sample>& samples,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("save_dataset: cannot open " + path.string());
  std::string buf;
  buf.reserve(512);
  out << kCsvHeader << '\n';
  for (const Sample& s : samples) {
    buf.clear();
    buf += std::to_string(s.channel_seed);
    buf += ',';
    buf += std::to_string(s.num_sections);
    buf += ',';
    append_double(buf, s.label_sigma_mdg_db);
    buf += ',';
    append_double(buf, s.label_snr_db);
    for (double f : s.features) {
      buf += ',';
      append_double(buf, f);
    }
    buf += '\n';
    out << buf;
  }
  if (!out)
    throw std::runtime_error("save_dataset: write failed for " + path.string());
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("load_dataset: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_dataset: empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::runtime_error("load_dataset: unexpected header in " +
                             path.string());

  std::vector<Sample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> toks;
    toks.reserve(16);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      toks.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (toks.size() != 16)
      throw std::runtime_error("load_dataset: expected 16 columns, got " +
                               std::to_string(toks.size()) + " on line " +
                               std::to_string(line_no));
    Sample s;
    try {
      s.channel_seed = std::stoull(toks[0]);
      s.num_sections = std::stoi(toks[1]);
    } catch (const std::exception&) {
      throw std::runtime_error("load_dataset: malformed metadata on line " +
                               std::to_string(line_no));
    }
    s.label_sigma_mdg_db = parse_double(toks[2], line_no);
    s.label_snr_db = parse_double(toks[3], line_no);
    for (int f = 0; f < kNumFeatures; ++f)
      s.features[f] = parse_double(toks[4 + f], line_no);
    samples.push_back(s);
  }
  if (samples.empty())
    throw std::runtime_error("load_dataset: no samples in " + path.string());
  return samples;
}

}  // namespace sdmest

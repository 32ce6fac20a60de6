#include "sdmest/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "sdmest/rng.hpp"

namespace sdmest {

std::string target_name(Target t) {
  return t == Target::kSigmaMdg ? "sigma_mdg" : "snr";
}

Target target_from_name(const std::string& name) {
  if (name == "sigma_mdg") return Target::kSigmaMdg;
  if (name == "snr") return Target::kSnr;
  throw std::invalid_argument("unknown target '" + name + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1)
    throw std::invalid_argument("TrainConfig: epochs and batch_size >= 1");
  if (!(learning_rate > 0.0) || !(adam_epsilon > 0.0))
    throw std::invalid_argument("TrainConfig: rates must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: betas must be in [0, 1)");
}

std::string TrainConfig::fingerprint() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "epochs=%d;batch=%d;lr=%.17g;b1=%.17g;b2=%.17g;eps=%.17g;"
                "shuffle=%llu;init=%llu",
                epochs, batch_size, learning_rate, adam_beta1, adam_beta2,
                adam_epsilon, static_cast<unsigned long long>(shuffle_seed),
                static_cast<unsigned long long>(init_seed));
  return buf;
}

MlpParams init_params(std::uint64_t seed, Target target,
                      const StandardizationStats& stats) {
  Rng rng(seed);
  MlpParams p;
  p.stats = stats;
  p.target = target;
  const double lim1 = std::sqrt(6.0 / (kNumFeatures + 6));
  for (auto& row : p.w1)
    for (double& w : row) w = lim1 * (2.0 * rng.uniform01() - 1.0);
  const double lim2 = std::sqrt(6.0 / (6 + 1));
  for (double& w : p.w2) w = lim2 * (2.0 * rng.uniform01() - 1.0);
  p.b1.fill(0.0);
  p.b2 = 0.0;
  return p;
}

namespace {

struct HiddenState {
  std::array<double, 6> act;  // tanh outputs
};

double forward_impl(const MlpParams& p, std::span<const double, kNumFeatures> f,
                    HiddenState* hs) {
  double out = p.b2;
  for (int j = 0; j < 6; ++j) {
    double z = p.b1[j];
    for (int k = 0; k < kNumFeatures; ++k) z += p.w1[j][k] * f[k];
    const double h = std::tanh(z);
    if (hs != nullptr) hs->act[j] = h;
    out += p.w2[j] * h;
  }
  return out;
}

}  // namespace

double forward(const MlpParams& p, std::span<const double, kNumFeatures> f) {
  return forward_impl(p, f, nullptr);
}

MlpGradients backward(const MlpParams& p,
                      std::span<const double, kNumFeatures> f,
                      double target_value) {
  HiddenState hs;
  const double pred = forward_impl(p, f, &hs);
  const double e = 2.0 * (pred - target_value);
  MlpGradients g;
  g.b2 = e;
  for (int j = 0; j < 6; ++j) {
    g.w2[j] = e * hs.act[j];
    const double dz = e * p.w2[j] * (1.0 - hs.act[j] * hs.act[j]);
    g.b1[j] = dz;
    for (int k = 0; k < kNumFeatures; ++k) g.w1[j][k] = dz * f[k];
  }
  return g;
}

double mse_loss(const MlpParams& p, const Dataset& ds, Target target) {
  if (ds.samples.empty())
    throw std::invalid_argument("mse_loss: empty dataset");
  double acc = 0.0;
  for (const Sample& s : ds.samples) {
    const double label =
        target == Target::kSigmaMdg ? s.label_sigma_mdg_db : s.label_snr_db;
    const double d = forward(p, s.features) - label;
    acc += d * d;
  }
  return acc / double(ds.samples.size());
}

std::pair<MlpParams, TrainHistory> train(const Dataset& train_set,
                                         const Dataset& holdout_set,
                                         const StandardizationStats& stats,
                                         const TrainConfig& cfg,
                                         Target target) {
  cfg.validate();
  if (train_set.samples.empty() || holdout_set.samples.empty())
    throw std::invalid_argument("train: empty train or holdout set");
  if (!train_set.standardized || !holdout_set.standardized)
    throw std::invalid_argument("train: sets must be standardized");

  MlpParams p = init_params(cfg.init_seed, target, stats);
  p.train_fingerprint = cfg.fingerprint();

  MlpGradients m{}, v{};
  double t_step = 0.0;
  const std::size_t n = train_set.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory hist;
  hist.train_loss.reserve(cfg.epochs);
  hist.holdout_loss.reserve(cfg.epochs);

  const auto label_of = [&](const Sample& s) {
    return target == Target::kSigmaMdg ? s.label_sigma_mdg_db : s.label_snr_db;
  };

  const auto adam_update = [&](double& theta, double& m_, double& v_,
                               double g) {
    m_ = cfg.adam_beta1 * m_ + (1.0 - cfg.adam_beta1) * g;
    v_ = cfg.adam_beta2 * v_ + (1.0 - cfg.adam_beta2) * g * g;
    const double mh = m_ / (1.0 - std::pow(cfg.adam_beta1, t_step));
    const double vh = v_ / (1.0 - std::pow(cfg.adam_beta2, t_step));
    theta -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
  };

  double first_epoch_loss = 0.0;
  int high_loss_streak = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.shuffle_seed,
                                {seed_tag::kMlpShuffle,
                                 static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j =
          std::min(static_cast<std::size_t>(shuffle_rng.uniform01() * double(i)),
                   i - 1);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_sq_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      const double bsz = double(stop - start);
      MlpGradients batch{};
      for (std::size_t k = start; k < stop; ++k) {
        const Sample& s = train_set.samples[order[k]];
        const double label = label_of(s);
        HiddenState hs;
        const double pred = forward_impl(p, s.features, &hs);
        const double err = pred - label;
        epoch_sq_sum += err * err;
        const double e = 2.0 * err / bsz;
        batch.b2 += e;
        for (int j = 0; j < 6; ++j) {
          batch.w2[j] += e * hs.act[j];
          const double dz = e * p.w2[j] * (1.0 - hs.act[j] * hs.act[j]);
          batch.b1[j] += dz;
          for (int f = 0; f < kNumFeatures; ++f)
            batch.w1[j][f] += dz * s.features[f];
        }
      }
      t_step += 1.0;
      for (int j = 0; j < 6; ++j) {
        for (int f = 0; f < kNumFeatures; ++f)
          adam_update(p.w1[j][f], m.w1[j][f], v.w1[j][f], batch.w1[j][f]);
        adam_update(p.b1[j], m.b1[j], v.b1[j], batch.b1[j]);
        adam_update(p.w2[j], m.w2[j], v.w2[j], batch.w2[j]);
      }
      adam_update(p.b2, m.b2, v.b2, batch.b2);
    }

    const double train_loss = epoch_sq_sum / double(n);
    hist.train_loss.push_back(train_loss);
    hist.holdout_loss.push_back(mse_loss(p, holdout_set, target));

    if (epoch == 0) {
      first_epoch_loss = train_loss;
    } else if (train_loss > 10.0 * first_epoch_loss) {
      if (++high_loss_streak >= 10)
        throw std::runtime_error(
            "train: diverged (loss " + std::to_string(train_loss) +
            " above 10x first-epoch loss " +
            std::to_string(first_epoch_loss) + " for 10 epochs)");
    } else {
      high_loss_streak = 0;
    }
  }
  return {std::move(p), std::move(hist)};
}

double predict(const MlpParams& p, std::span<const double> raw_features) {
  if (raw_features.size() != kNumFeatures)
    throw std::invalid_argument("predict: expected 12 features, got " +
                                std::to_string(raw_features.size()));
  std::array<double, kNumFeatures> f{};
  for (int k = 0; k < kNumFeatures; ++k)
    f[k] = (raw_features[k] - p.stats.mean[k]) / p.stats.std_dev[k];
  return forward(p, f);
}

namespace {

constexpr int kModelSchemaVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_model(const MlpParams& p, const std::filesystem::path& path) {
  // Hand-rolled emission to guarantee the 17-significant-digit layout.
  std::string s;
  s += "{\n  \"schema_version\": " + std::to_string(kModelSchemaVersion);
  s += ",\n  \"target\": \"" + target_name(p.target) + "\"";
  s += ",\n  \"activation\": \"" + p.activation + "\"";
  s += ",\n  \"stats\": {\n    \"mean\": [";
  for (int k = 0; k < kNumFeatures; ++k)
    s += (k ? ", " : "") + fmt17(p.stats.mean[k]);
  s += "],\n    \"std\": [";
  for (int k = 0; k < kNumFeatures; ++k)
    s += (k ? ", " : "") + fmt17(p.stats.std_dev[k]);
  s += "]\n  },\n  \"layers\": {\n    \"W1\": [";
  for (int j = 0; j < 6; ++j) {
    s += j ? ",\n           [" : "[";
    for (int k = 0; k < kNumFeatures; ++k)
      s += (k ? ", " : "") + fmt17(p.w1[j][k]);
    s += "]";
  }
  s += "],\n    \"b1\": [";
  for (int j = 0; j < 6; ++j) s += (j ? ", " : "") + fmt17(p.b1[j]);
  s += "],\n    \"w2\": [";
  for (int j = 0; j < 6; ++j) s += (j ? ", " : "") + fmt17(p.w2[j]);
  s += "],\n    \"b2\": " + fmt17(p.b2);
  s += "\n  },\n  \"train_fingerprint\": " +
       nlohmann::json(p.train_fingerprint).dump();
  s += "\n}\n";

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("save_model: cannot open " + path.string());
  out << s;
  if (!out)
    throw std::runtime_error("save_model: write failed for " + path.string());
}

MlpParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("load_model: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_model: parse failure in " + path.string() +
                             ": " + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw std::runtime_error(
          "schema version mismatch (expected " +
          std::to_string(kModelSchemaVersion) + ", got " +
          j.at("schema_version").dump() + ")");
    MlpParams p;
    p.target = target_from_name(j.at("target").get<std::string>());
    p.activation = j.at("activation").get<std::string>();
    if (p.activation != "tanh")
      throw std::runtime_error("unsupported activation '" + p.activation + "'");
    const auto& stats = j.at("stats");
    for (int k = 0; k < kNumFeatures; ++k) {
      p.stats.mean[k] = stats.at("mean").at(k).get<double>();
      p.stats.std_dev[k] = stats.at("std").at(k).get<double>();
    }
    const auto& layers = j.at("layers");
    for (int jj = 0; jj < 6; ++jj) {
      for (int k = 0; k < kNumFeatures; ++k)
        p.w1[jj][k] = layers.at("W1").at(jj).at(k).get<double>();
      p.b1[jj] = layers.at("b1").at(jj).get<double>();
      p.w2[jj] = layers.at("w2").at(jj).get<double>();
    }
    p.b2 = layers.at("b2").get<double>();
    p.train_fingerprint = j.at("train_fingerprint").get<std::string>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: bad schema in " + path.string() +
                             ": " + e.what());
  }
}

}  // namespace sdmest

#include "sdmest/config.hpp"

#include <fstream>
#include <sstream>

namespace sdmest {

std::uint64_t RunConfig::seed() const {
  if (!master_seed.has_value())
    throw UsageError(
        "no master seed: set master_seed in the config file or pass --seed "
        "(runs never default to wall-clock seeds)");
  return *master_seed;
}

DatasetConfig RunConfig::dataset_config() const {
  DatasetConfig d;
  d.n_channels = dataset_n_channels;
  d.sigma_low_db = dataset_sigma_low_db;
  d.sigma_high_db = dataset_sigma_high_db;
  d.snr_values_db = dataset_snr_values_db;
  d.link = link;
  d.sinr_imp_db = dataset_sinr_imp_db;
  d.master_seed = seed();
  d.train_fraction = dataset_train_fraction;
  return d;
}

GridConfig RunConfig::grid_config() const {
  GridConfig g;
  g.sigma_centers_db = grid_sigma_centers_db;
  g.snr_centers_db = grid_snr_centers_db;
  g.channels_per_cell = grid_channels_per_cell;
  g.sigma_halfwidth_db = grid_sigma_halfwidth_db;
  g.min_cell_count = grid_min_cell_count;
  g.link = link;
  g.sinr_imp_db = dataset_sinr_imp_db;
  return g;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw UsageError("config: bad numeric value '" + value + "' for key '" +
                     key + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_num(key, value);
  const int i = static_cast<int>(v);
  if (double(i) != v)
    throw UsageError("config: key '" + key + "' expects an integer, got '" +
                     value + "'");
  return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw UsageError("config: bad unsigned value '" + value + "' for key '" +
                     key + "'");
  }
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty())
      throw UsageError("config: empty list element for key '" + key + "'");
    out.push_back(parse_num(key, tok));
  }
  if (out.empty())
    throw UsageError("config: empty list for key '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config: bad boolean '" + value + "' for key '" + key +
                   "'");
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value) {
  if (key == "master_seed")
    cfg.master_seed = parse_u64(key, value);
  else if (key == "out_dir")
    cfg.out_dir = value;
  else if (key == "link.num_modes")
    cfg.link.num_modes = parse_int(key, value);
  else if (key == "link.num_sections")
    cfg.link.num_sections = parse_int(key, value);
  else if (key == "link.normalize_power")
    cfg.link.normalize_power = parse_bool(key, value);
  else if (key == "dataset.n_channels")
    cfg.dataset_n_channels = parse_int(key, value);
  else if (key == "dataset.sigma_low_db")
    cfg.dataset_sigma_low_db = parse_num(key, value);
  else if (key == "dataset.sigma_high_db")
    cfg.dataset_sigma_high_db = parse_num(key, value);
  else if (key == "dataset.snr_values_db")
    cfg.dataset_snr_values_db = parse_list(key, value);
  else if (key == "dataset.sinr_imp_db")
    cfg.dataset_sinr_imp_db = parse_num(key, value);
  else if (key == "dataset.train_fraction")
    cfg.dataset_train_fraction = parse_num(key, value);
  else if (key == "train.epochs")
    cfg.train.epochs = parse_int(key, value);
  else if (key == "train.batch_size")
    cfg.train.batch_size = parse_int(key, value);
  else if (key == "train.learning_rate")
    cfg.train.learning_rate = parse_num(key, value);
  else if (key == "train.adam_beta1")
    cfg.train.adam_beta1 = parse_num(key, value);
  else if (key == "train.adam_beta2")
    cfg.train.adam_beta2 = parse_num(key, value);
  else if (key == "train.adam_epsilon")
    cfg.train.adam_epsilon = parse_num(key, value);
  else if (key == "grid.sigma_centers_db")
    cfg.grid_sigma_centers_db = parse_list(key, value);
  else if (key == "grid.snr_centers_db")
    cfg.grid_snr_centers_db = parse_list(key, value);
  else if (key == "grid.channels_per_cell")
    cfg.grid_channels_per_cell = parse_int(key, value);
  else if (key == "grid.sigma_halfwidth_db")
    cfg.grid_sigma_halfwidth_db = parse_num(key, value);
  else if (key == "grid.min_cell_count")
    cfg.grid_min_cell_count = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "oracle.sigma_targets_db")
    cfg.oracle.sigma_targets_db = parse_list(key, value);
  else if (key == "oracle.snr_values_db")
    cfg.oracle.snr_values_db = parse_list(key, value);
  else if (key == "oracle.n_symbols")
    cfg.oracle.n_symbols = static_cast<std::size_t>(parse_u64(key, value));
  else if (key == "oracle.channels_per_cell")
    cfg.oracle.channels_per_cell = parse_int(key, value);
  else if (key == "oracle.max_deviation_db")
    cfg.oracle.max_deviation_db = parse_num(key, value);
  else if (key == "oracle.sinr_imp_db")
    cfg.oracle.sinr_imp_db = parse_num(key, value);
  else
    throw UsageError("config: unknown key '" + key + "'");
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("config: cannot open '" + path.string() + "'");
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config: line " + std::to_string(line_no) +
                       " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw UsageError("config: empty key or value on line " +
                       std::to_string(line_no));
    apply_config_line(cfg, key, value);
  }
  return cfg;
}

}  // namespace sdmest

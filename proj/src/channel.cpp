#include "sdmest/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sdmest {

void LinkConfig::validate() const {
  if (num_modes < 1)
    throw std::invalid_argument("LinkConfig: num_modes must be >= 1");
  if (num_sections < 1)
    throw std::invalid_argument("LinkConfig: num_sections must be >= 1");
  if (!(sigma_g >= 0.0))
    throw std::invalid_argument("LinkConfig: sigma_g must be >= 0");
}

double sigma_mdg_db(const CMat& h) {
  if (!h.square()) throw std::invalid_argument("sigma_mdg_db: H must be square");
  const EigenResult eig = hermitian_eigenvalues(h * h.adjoint());
  double mean = 0.0;
  std::vector<double> logs(eig.eigenvalues.size());
  for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
    const double lam = eig.eigenvalues[i];
    if (!(lam > 0.0))
      throw std::runtime_error("sigma_mdg_db: H is singular (eigenvalue " +
                               std::to_string(lam) + ")");
    logs[i] = 10.0 * std::log10(lam);
    mean += logs[i];
  }
  mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double v : logs) var += (v - mean) * (v - mean);
  var /= static_cast<double>(logs.size());  // population variance over modes
  return std::sqrt(var);
}

ChannelRealization generate_channel(const LinkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t d = static_cast<std::size_t>(cfg.dim());
  Rng rng(seed);

  CMat h = CMat::identity(d);
  std::vector<double> gains(d);
  for (int k = 0; k < cfg.num_sections; ++k) {
    const CMat u = sample_haar_unitary(d, rng);
    const CMat v = sample_haar_unitary(d, rng);
    for (std::size_t i = 0; i < d; ++i)
      gains[i] = std::exp(0.5 * cfg.sigma_g * rng.normal());

    // section = U diag(exp(g/2)) V^H, applied on the left
    CMat ug = u;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) ug(r, c) *= gains[c];
    h = ug * v.adjoint() * h;
  }

  if (cfg.normalize_power) {
    const double fn = h.frobenius_norm();
    if (!(fn > 0.0))
      throw std::runtime_error("generate_channel: degenerate channel norm");
    h *= std::sqrt(static_cast<double>(d)) / fn;
  }

  ChannelRealization out;
  out.sigma_mdg_db = sigma_mdg_db(h);
  out.h = std::move(h);
  out.seed = seed;
  return out;
}

namespace {

double ensemble_mean_sigma_mdg(double sigma_g, int num_sections, int dim,
                               std::uint64_t seed, int num_draws) {
  LinkConfig cfg;
  cfg.num_modes = dim / 2;
  cfg.num_sections = num_sections;
  cfg.sigma_g = sigma_g;
  cfg.normalize_power = true;
  double acc = 0.0;
  for (int i = 0; i < num_draws; ++i) {
    const std::uint64_t s = derive_seed(
        seed, {seed_tag::kCalibration, static_cast<std::uint64_t>(i)});
    acc += generate_channel(cfg, s).sigma_mdg_db;
  }
  return acc / num_draws;
}

}  // namespace

double calibrate_sigma_g(double target_db, int num_sections, int dim,
                         std::uint64_t seed, CalibrationOptions opts) {
  if (target_db == 0.0) return 0.0;
  if (!(target_db > 0.0))
    throw std::invalid_argument("calibrate_sigma_g: target must be >= 0");
  if (dim < 2 || dim % 2 != 0)
    throw std::invalid_argument("calibrate_sigma_g: dim must be even, >= 2");

  const auto mean_at = [&](double sg) {
    return ensemble_mean_sigma_mdg(sg, num_sections, dim, seed, opts.num_draws);
  };

  // Weak-regime guess: accumulated spread ~ sqrt(K) * sigma_g nepers.
  const double ln10_over_10 = std::log(10.0) / 10.0;
  double hi = 1.5 * target_db * ln10_over_10 / std::sqrt(double(num_sections));
  double hi_val = mean_at(hi);
  int used = 1;
  while (hi_val < target_db && used < opts.max_iterations) {
    hi *= 2.0;
    hi_val = mean_at(hi);
    ++used;
  }
  if (hi_val < target_db)
    throw std::runtime_error("calibrate_sigma_g: failed to bracket target");

  double lo = 0.0;  // mean sigma_mdg at sigma_g = 0 is exactly 0
  double mid = hi;
  for (; used < opts.max_iterations; ++used) {
    mid = 0.5 * (lo + hi);
    const double v = mean_at(mid);
    if (std::abs(v - target_db) <= opts.rel_tol * target_db) return mid;
    if (v < target_db)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error(
      "calibrate_sigma_g: no convergence within iteration budget (target " +
      std::to_string(target_db) + " dB)");
}

MdgCalibrationCurve MdgCalibrationCurve::build(int num_sections, int dim,
                                               std::uint64_t seed,
                                               double max_target_db,
                                               int grid_points,
                                               int draws_per_point) {
  if (grid_points < 4)
    throw std::invalid_argument("MdgCalibrationCurve: need >= 4 grid points");
  if (!(max_target_db > 0.0))
    throw std::invalid_argument("MdgCalibrationCurve: max target must be > 0");

  const double ln10_over_10 = std::log(10.0) / 10.0;
  double sg_max =
      1.3 * max_target_db * ln10_over_10 / std::sqrt(double(num_sections));

  // Make sure the grid top covers the requested target range.
  while (ensemble_mean_sigma_mdg(sg_max, num_sections, dim, seed,
                                 draws_per_point) < max_target_db) {
    sg_max *= 1.5;
    if (sg_max > 100.0)
      throw std::runtime_error("MdgCalibrationCurve: cannot reach max target");
  }

  MdgCalibrationCurve curve;
  curve.sigma_g_.resize(grid_points);
  curve.mean_db_.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double sg = sg_max * double(i) / double(grid_points - 1);
    curve.sigma_g_[i] = sg;
    curve.mean_db_[i] =
        (i == 0) ? 0.0
                 : ensemble_mean_sigma_mdg(sg, num_sections, dim, seed,
                                           draws_per_point);
  }
  for (int i = 1; i < grid_points; ++i) {
    if (!(curve.mean_db_[i] > curve.mean_db_[i - 1]))
      throw std::runtime_error(
          "MdgCalibrationCurve: sampled means are not increasing; "
          "raise draws_per_point");
  }
  return curve;
}

double MdgCalibrationCurve::sigma_g_for(double target_db) const {
  if (target_db == 0.0) return 0.0;
  if (!(target_db > 0.0))
    throw std::invalid_argument("MdgCalibrationCurve: target must be >= 0");
  if (target_db > mean_db_.back())
    throw std::invalid_argument(
        "MdgCalibrationCurve: target above calibrated range");
  // Monotone piecewise-linear inverse; grid is dense enough that the
  // interpolation error is well below the Monte Carlo noise.
  auto it = std::lower_bound(mean_db_.begin(), mean_db_.end(), target_db);
  std::size_t i1 = static_cast<std::size_t>(it - mean_db_.begin());
  if (i1 == 0) i1 = 1;
  const std::size_t i0 = i1 - 1;
  const double t =
      (target_db - mean_db_[i0]) / (mean_db_[i1] - mean_db_[i0]);
  return sigma_g_[i0] + t * (sigma_g_[i1] - sigma_g_[i0]);
}

}  // namespace sdmest

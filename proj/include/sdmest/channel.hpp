#pragma once

#include <cstdint>
#include <vector>

#include "sdmest/linalg.hpp"

namespace sdmest {

/// Multisection link description. The channel is a product of num_sections
/// independent unitary-gain-unitary sandwiches; per-section log-power gains
/// are i.i.d. N(0, sigma_g^2) (nepers).
struct LinkConfig {
  int num_modes = 3;       // spatial modes; streams = 2 * num_modes
  int num_sections = 50;   // 2,500 km at 50 km amplifier spacing
  double sigma_g = 0.0;    // per-section gain std, log-power nepers
  bool normalize_power = true;

  int dim() const { return 2 * num_modes; }
  void validate() const;
};

struct ChannelRealization {
  CMat h;
  double sigma_mdg_db = 0.0;
  std::uint64_t seed = 0;
};

/// Accumulated mode-dependent gain: population standard deviation over modes
/// of 10*log10 of the eigenvalues of H H^H. Throws on singular H.
double sigma_mdg_db(const CMat& h);

/// Draws one channel H = prod_k U_k G_k V_k^H with U_k, V_k Haar unitaries
/// and G_k = diag(exp(g_i / 2)). If cfg.normalize_power, H is scaled so that
/// ||H||_F^2 = dim.
ChannelRealization generate_channel(const LinkConfig& cfg, std::uint64_t seed);

struct CalibrationOptions {
  int num_draws = 1000;    // ensemble size per bisection evaluation
  double rel_tol = 0.03;   // target accuracy on the ensemble mean
  int max_iterations = 80;
};

/// Finds sigma_g such that the Monte Carlo ensemble mean of sigma_mdg over
/// opts.num_draws channels is within opts.rel_tol of target_db. Monotone
/// bisection with common random numbers across evaluations. Throws
/// std::runtime_error when the iteration budget is exhausted.
double calibrate_sigma_g(double target_db, int num_sections, int dim,
                         std::uint64_t seed, CalibrationOptions opts = {});

/// Batch calibration: a Monte Carlo map sigma_g -> ensemble-mean sigma_mdg,
/// sampled once on a grid and inverted by monotone interpolation. Used by the
/// dataset pipeline where hundreds of targets share one (K, D) geometry.
class MdgCalibrationCurve {
 public:
  static MdgCalibrationCurve build(int num_sections, int dim,
                                   std::uint64_t seed, double max_target_db,
                                   int grid_points = 16,
                                   int draws_per_point = 1500);

  /// sigma_g whose ensemble-mean sigma_mdg equals target_db.
  double sigma_g_for(double target_db) const;
  double max_mean_db() const { return mean_db_.back(); }

 private:
  std::vector<double> sigma_g_;  // ascending, sigma_g_[0] == 0
  std::vector<double> mean_db_;  // ensemble means, strictly increasing
};

}  // namespace sdmest

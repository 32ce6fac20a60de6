#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "sdmest/linalg.hpp"

namespace sdmest {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Receiver-input SNR together with the implementation-penalty SINR measured
/// back-to-back. An absent sinr_imp_db means an ideal receiver.
struct SnrPoint {
  double snr_db = 0.0;
  std::optional<double> sinr_imp_db;
};

/// SNR' = 1 / (SNR^-1 + SINR_imp^-1), linear. Equals the linear SNR exactly
/// when the penalty is unbounded.
double effective_snr_linear(const SnrPoint& p);

/// W = (I/snr + H^H H)^-1 H^H.
CMat mmse_matrix(const CMat& h, double snr_linear);

/// Eigenvalues of W^-1 (W^-1)^H, descending: the power gains of the channel
/// estimate a receiver forms by inverting its converged MMSE equalizer.
std::vector<double> equalizer_eigenvalues(const CMat& w);

/// Baseline MDG estimator: population std of 10*log10 of the equalizer
/// eigenvalues at SNR'. Biased low at low SNR / high MDG.
double conventional_sigma_mdg_estimate_db(const CMat& h, const SnrPoint& p);

/// Per-stream MMSE SINR, linear: SINR_i = 1/[(I + SNR' H^H H)^-1]_ii - 1.
std::vector<double> sinr_per_stream(const CMat& h, const SnrPoint& p);

/// Baseline SNR estimator: dB of the arithmetic mean of the linear SINRs.
double conventional_snr_estimate_db(const std::vector<double>& sinr_linear);

/// SNR = OSNR * (T_s * 12.5 GHz), in dB.
double osnr_to_snr_db(double osnr_db, double symbol_time_s);

}  // namespace sdmest

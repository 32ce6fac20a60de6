#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdmest/linalg.hpp"
#include "sdmest/mmse.hpp"

namespace sdmest {

/// Upper cap for the LS SINR estimate; returned instead of infinity when the
/// residual power underflows (e.g. a noiseless loopback).
inline constexpr double kLsSinrCap = 1e15;

/// One symbol-level Monte Carlo run: unit-power QPSK through y = Hx + n with
/// per-stream complex noise variance 1/SNR, equalized by the MMSE matrix at
/// the same SNR. Streams are stored per index, tx[i][t] / eq[i][t].
struct TransmissionRun {
  CMat h;
  double snr_db = 0.0;
  std::size_t n_symbols = 0;
  std::vector<std::vector<cxd>> tx;
  std::vector<std::vector<cxd>> eq;
  std::uint64_t seed = 0;
};

/// Requires ||H||_F^2 = dim (the noise-scaling convention depends on it) and
/// n_symbols >= 1000.
TransmissionRun simulate_transmission(const CMat& h, double snr_db,
                                      std::size_t n_symbols,
                                      std::uint64_t seed);

/// Single-coefficient least-squares SINR: h_ls = sum(y conj(x)) / sum|x|^2,
/// SINR = |h_ls|^2 mean|x|^2 / mean|y - h_ls x|^2. Linear. Capped at
/// kLsSinrCap. Throws on zero-power reference or length mismatch.
double ls_sinr_estimate(std::span<const cxd> eq_stream,
                        std::span<const cxd> ref_stream);

/// Runs a transmission at p.snr_db and compares the per-stream LS SINR
/// estimates against the closed-form MMSE SINRs evaluated at SNR' from p.
/// Returns the max per-stream deviation in dB.
double oracle_check_max_deviation_db(const CMat& h, const SnrPoint& p,
                                     std::size_t n_symbols,
                                     std::uint64_t seed);

}  // namespace sdmest

#include "sdmest/signal_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdmest {

TransmissionRun simulate_transmission(const CMat& h, double snr_db,
                                      std::size_t n_symbols,
                                      std::uint64_t seed) {
  if (!h.square())
    throw std::invalid_argument("simulate_transmission: H must be square");
  const std::size_t d = h.rows();
  const double fn2 = h.frobenius_norm() * h.frobenius_norm();
  if (std::abs(fn2 - static_cast<double>(d)) > 1e-6 * d)
    throw std::invalid_argument(
        "simulate_transmission: H must be power-normalized (||H||_F^2 = D), "
        "got " +
        std::to_string(fn2));
  if (n_symbols < 1000)
    throw std::invalid_argument(
        "simulate_transmission: n_symbols must be >= 1000");

  const double snr = db_to_linear(snr_db);
  const double noise_amp = std::sqrt(0.5 / snr);  // per real component
  const CMat w = mmse_matrix(h, snr);

  Rng rng(seed);
  TransmissionRun run;
  run.h = h;
  run.snr_db = snr_db;
  run.n_symbols = n_symbols;
  run.seed = seed;
  run.tx.assign(d, std::vector<cxd>(n_symbols));
  run.eq.assign(d, std::vector<cxd>(n_symbols));

  constexpr double kInvSqrt2 = 0.7071067811865475244;
  std::vector<cxd> x(d), y(d);
  for (std::size_t t = 0; t < n_symbols; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const double re = rng.uniform01() < 0.5 ? -kInvSqrt2 : kInvSqrt2;
      const double im = rng.uniform01() < 0.5 ? -kInvSqrt2 : kInvSqrt2;
      x[i] = {re, im};
      run.tx[i][t] = x[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      cxd acc = {noise_amp * rng.normal(), noise_amp * rng.normal()};
      for (std::size_t k = 0; k < d; ++k) acc += h(i, k) * x[k];
      y[i] = acc;
    }
    for (std::size_t i = 0; i < d; ++i) {
      cxd acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += w(i, k) * y[k];
      run.eq[i][t] = acc;
    }
  }
  return run;
}

double ls_sinr_estimate(std::span<const cxd> eq_stream,
                        std::span<const cxd> ref_stream) {
  if (eq_stream.size() != ref_stream.size())
    throw std::invalid_argument("ls_sinr_estimate: length mismatch");
  const std::size_t n = eq_stream.size();
  if (n < 1000)
    throw std::invalid_argument("ls_sinr_estimate: need >= 1000 symbols");

  cxd cross = 0.0;
  double ref_pow = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    cross += eq_stream[t] * std::conj(ref_stream[t]);
    ref_pow += std::norm(ref_stream[t]);
  }
  if (!(ref_pow > 0.0))
    throw std::invalid_argument("ls_sinr_estimate: reference has zero power");
  const cxd h_ls = cross / ref_pow;

  double resid = 0.0;
  for (std::size_t t = 0; t < n; ++t)
    resid += std::norm(eq_stream[t] - h_ls * ref_stream[t]);
  resid /= static_cast<double>(n);
  const double mean_ref = ref_pow / static_cast<double>(n);
  const double sig = std::norm(h_ls) * mean_ref;
  if (!(resid > sig / kLsSinrCap)) return kLsSinrCap;
  return sig / resid;
}

double oracle_check_max_deviation_db(const CMat& h, const SnrPoint& p,
                                     std::size_t n_symbols,
                                     std::uint64_t seed) {
  const TransmissionRun run =
      simulate_transmission(h, p.snr_db, n_symbols, seed);
  const std::vector<double> analytic = sinr_per_stream(h, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    const double ls = ls_sinr_estimate(run.eq[i], run.tx[i]);
    worst = std::max(
        worst, std::abs(linear_to_db(ls) - linear_to_db(analytic[i])));
  }
  return worst;
}

}  // namespace sdmest

#include "sdmest/mmse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdmest {

double effective_snr_linear(const SnrPoint& p) {
  if (!std::isfinite(p.snr_db))
    throw std::invalid_argument("effective_snr: snr_db must be finite");
  const double snr = db_to_linear(p.snr_db);
  if (!p.sinr_imp_db.has_value()) return snr;
  const double imp = db_to_linear(*p.sinr_imp_db);
  return 1.0 / (1.0 / snr + 1.0 / imp);
}

CMat mmse_matrix(const CMat& h, double snr_linear) {
  if (!h.square()) throw std::invalid_argument("mmse_matrix: H must be square");
  if (!(snr_linear > 0.0))
    throw std::invalid_argument("mmse_matrix: SNR must be > 0");
  const std::size_t d = h.rows();
  const CMat hh = h.adjoint() * h;
  CMat a = hh;
  for (std::size_t i = 0; i < d; ++i) a(i, i) += 1.0 / snr_linear;
  return invert(a) * h.adjoint();
}

std::vector<double> equalizer_eigenvalues(const CMat& w) {
  const CMat winv = invert(w);
  EigenResult eig = hermitian_eigenvalues(winv * winv.adjoint());
  std::reverse(eig.eigenvalues.begin(), eig.eigenvalues.end());
  return eig.eigenvalues;
}

double conventional_sigma_mdg_estimate_db(const CMat& h, const SnrPoint& p) {
  const std::vector<double> eigs =
      equalizer_eigenvalues(mmse_matrix(h, effective_snr_linear(p)));
  double mean = 0.0;
  std::vector<double> logs(eigs.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    logs[i] = 10.0 * std::log10(eigs[i]);
    mean += logs[i];
  }
  mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double v : logs) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(logs.size()));
}

std::vector<double> sinr_per_stream(const CMat& h, const SnrPoint& p) {
  if (!h.square())
    throw std::invalid_argument("sinr_per_stream: H must be square");
  const double s = effective_snr_linear(p);
  const std::size_t d = h.rows();
  CMat a = h.adjoint() * h;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) *= s;
    a(i, i) += 1.0;
  }
  const CMat e = invert(a);
  std::vector<double> sinr(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double mse = e(i, i).real();
    if (!(mse > 0.0))
      throw std::runtime_error("sinr_per_stream: non-positive diagonal MSE");
    sinr[i] = 1.0 / mse - 1.0;
  }
  return sinr;
}

double conventional_snr_estimate_db(const std::vector<double>& sinr_linear) {
  if (sinr_linear.empty())
    throw std::invalid_argument("conventional_snr_estimate: empty SINR vector");
  double acc = 0.0;
  for (double v : sinr_linear) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(
          "conventional_snr_estimate: SINRs must be positive and finite");
    acc += v;
  }
  return linear_to_db(acc / static_cast<double>(sinr_linear.size()));
}

double osnr_to_snr_db(double osnr_db, double symbol_time_s) {
  if (!(symbol_time_s > 0.0))
    throw std::invalid_argument("osnr_to_snr: symbol time must be > 0");
  return osnr_db + 10.0 * std::log10(symbol_time_s * 12.5e9);
}

}  // namespace sdmest

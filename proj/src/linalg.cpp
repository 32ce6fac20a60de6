#include "sdmest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdmest {

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(const std::vector<cxd>& d) {
  CMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMat CMat::adjoint() const {
  CMat m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

CMat CMat::operator*(const CMat& rhs) const {
  if (cols_ != rhs.rows_)
    throw std::invalid_argument("CMat: dimension mismatch in product");
  CMat m(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const cxd aik = (*this)(i, k);
      if (aik == cxd{}) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) m(i, j) += aik * rhs(k, j);
    }
  }
  return m;
}

CMat CMat::operator+(const CMat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("CMat: dimension mismatch in sum");
  CMat m = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += rhs.a_[i];
  return m;
}

CMat CMat::operator-(const CMat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("CMat: dimension mismatch in difference");
  CMat m = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= rhs.a_[i];
  return m;
}

CMat& CMat::operator*=(cxd s) {
  for (auto& v : a_) v *= s;
  return *this;
}

double CMat::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double CMat::max_abs() const {
  double s = 0.0;
  for (const auto& v : a_) s = std::max(s, std::abs(v));
  return s;
}

bool CMat::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](const cxd& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double CMat::hermitian_residual() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      s = std::max(s, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return s;
}

namespace {

double offdiag_norm(const CMat& m) {
  double s = 0.0;
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

double diag_norm(const CMat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += std::norm(m(i, i));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing m(p, q). The rotation J acts as
// m <- J^H m J and is accumulated into v when eigenvectors are requested.
void jacobi_rotate(CMat& m, CMat* v, std::size_t p, std::size_t q) {
  const cxd apq = m(p, q);
  const double absb = std::abs(apq);
  if (absb == 0.0) return;
  const cxd phase = apq / absb;  // b = |b| e^{i phi}
  const double app = m(p, p).real();
  const double aqq = m(q, q).real();
  const double tau = (aqq - app) / (2.0 * absb);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // J(p,p)=c, J(p,q)=s, J(q,p)=-s e^{-i phi}, J(q,q)=c e^{-i phi}
  const cxd jqp = -s * std::conj(phase);
  const cxd jqq = c * std::conj(phase);

  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j) {  // m <- J^H m
    const cxd mp = m(p, j);
    const cxd mq = m(q, j);
    m(p, j) = c * mp + std::conj(jqp) * mq;
    m(q, j) = s * mp + std::conj(jqq) * mq;
  }
  for (std::size_t i = 0; i < n; ++i) {  // m <- m J
    const cxd mp = m(i, p);
    const cxd mq = m(i, q);
    m(i, p) = c * mp + jqp * mq;
    m(i, q) = s * mp + jqq * mq;
  }
  if (v != nullptr) {
    for (std::size_t i = 0; i < n; ++i) {
      const cxd vp = (*v)(i, p);
      const cxd vq = (*v)(i, q);
      (*v)(i, p) = c * vp + jqp * vq;
      (*v)(i, q) = s * vp + jqq * vq;
    }
  }
}

}  // namespace

EigenResult hermitian_eigenvalues(const CMat& m, bool want_vectors) {
  if (!m.square())
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
  const double herm = m.hermitian_residual();
  if (!(herm <= 1e-10 * std::max(1.0, m.max_abs())))
    throw std::invalid_argument(
        "hermitian_eigenvalues: input is not Hermitian (max |M - M^H| = " +
        std::to_string(herm) + ")");

  const std::size_t n = m.rows();
  CMat a = m;
  // Force exact Hermitian symmetry before sweeping.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = cxd(a(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const cxd avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }

  CMat v;
  if (want_vectors) v = CMat::identity(n);

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_norm(a) <= 1e-12 * std::max(diag_norm(a), 1e-300)) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        jacobi_rotate(a, want_vectors ? &v : nullptr, p, q);
  }
  if (!converged &&
      offdiag_norm(a) > 1e-12 * std::max(diag_norm(a), 1e-300))
    throw std::runtime_error("hermitian_eigenvalues: Jacobi sweep limit hit");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenResult res;
  res.eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    res.eigenvalues[k] = a(order[k], order[k]).real();
  if (want_vectors) {
    CMat vs(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
    res.eigenvectors = std::move(vs);
  }
  return res;
}

CMat invert(const CMat& m) {
  if (!m.square()) throw std::invalid_argument("invert: matrix is not square");
  const std::size_t n = m.rows();
  CMat a = m;
  CMat inv = CMat::identity(n);
  const double scale = std::max(m.max_abs(), 1e-300);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= 1e-14 * scale)
      throw std::runtime_error("invert: matrix is singular to working precision");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const cxd d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cxd f = a(r, col);
      if (f == cxd{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }

  const double cond = m.frobenius_norm() * inv.frobenius_norm();
  if (!(cond < 1e12))
    throw std::runtime_error(
        "invert: matrix is ill-conditioned (condition estimate " +
        std::to_string(cond) + ")");
  return inv;
}

CMat sample_haar_unitary(std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_haar_unitary: n must be >= 1");

  while (true) {
    CMat a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.complex_normal();

    // Householder QR; reflectors are accumulated into q afterwards.
    std::vector<std::vector<cxd>> vs;
    vs.reserve(n);
    bool degenerate = false;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<cxd> v(n - k);
      double xnorm2 = 0.0;
      for (std::size_t i = k; i < n; ++i) {
        v[i - k] = a(i, k);
        xnorm2 += std::norm(a(i, k));
      }
      const double xnorm = std::sqrt(xnorm2);
      if (xnorm < 1e-150) {
        degenerate = true;
        break;
      }
      const cxd x0 = v[0];
      const cxd phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cxd(1.0);
      const cxd alpha = -phase * xnorm;
      v[0] -= alpha;
      double vnorm2 = 0.0;
      for (const cxd& vi : v) vnorm2 += std::norm(vi);
      if (vnorm2 < 1e-300) {
        vs.emplace_back();  // no reflection needed
        continue;
      }
      const double beta = 2.0 / vnorm2;
      // a <- (I - beta v v^H) a on the trailing block
      for (std::size_t j = k; j < n; ++j) {
        cxd dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += std::conj(v[i - k]) * a(i, j);
        dot *= beta;
        for (std::size_t i = k; i < n; ++i) a(i, j) -= dot * v[i - k];
      }
      vs.push_back(std::move(v));
    }
    if (degenerate) continue;  // essentially-zero column; redraw

    // q = H_0 H_1 ... H_{n-1}, built by applying reflectors to I in reverse.
    CMat q = CMat::identity(n);
    for (std::size_t kk = n; kk-- > 0;) {
      const auto& v = vs[kk];
      if (v.empty()) continue;
      double vnorm2 = 0.0;
      for (const cxd& vi : v) vnorm2 += std::norm(vi);
      const double beta = 2.0 / vnorm2;
      for (std::size_t j = 0; j < n; ++j) {
        cxd dot = 0.0;
        for (std::size_t i = kk; i < n; ++i)
          dot += std::conj(v[i - kk]) * q(i, j);
        dot *= beta;
        for (std::size_t i = kk; i < n; ++i) q(i, j) -= dot * v[i - kk];
      }
    }

    // Rephase columns with the R-diagonal phases (r_kk = a(k, k) after the
    // sweep); this is what makes the distribution Haar rather than merely
    // unitary.
    bool zero_diag = false;
    for (std::size_t k = 0; k < n; ++k) {
      const cxd r = a(k, k);
      const double ar = std::abs(r);
      if (ar < 1e-150) {
        zero_diag = true;
        break;
      }
      const cxd ph = r / ar;
      for (std::size_t i = 0; i < n; ++i) q(i, k) *= ph;
    }
    if (zero_diag) continue;
    return q;
  }
}

}  // namespace sdmest

#include "lassoflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lassoflow/kernels.hpp"

namespace lassoflow {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("Mat: dimensions must be positive");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec matvec(const Mat& m, const Vec& x) {
  if (x.size() != m.cols())
    throw std::invalid_argument("matvec: dimension mismatch");
  Vec out(m.rows());
  kernels::active().matvec(m.data(), m.rows(), m.cols(), x.data(), out.data());
  return out;
}

Vec matvec_transposed(const Mat& m, const Vec& x) {
  if (x.size() != m.rows())
    throw std::invalid_argument("matvec_transposed: dimension mismatch");
  Vec out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    kernels::active().axpy(x[r], m.row(r), out.data(), m.cols());
  return out;
}

Mat gram_matrix(const Mat& a) {
  const std::size_t n = a.cols();
  Mat g(n, n, 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* row = a.row(r);
    for (std::size_t i = 0; i < n; ++i)
      kernels::active().axpy(row[i], row + i, g.row(i) + i, n - i);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  return kernels::active().dot(x.data(), y.data(), x.size());
}

double norm2sq(const Vec& x) {
  return kernels::active().sumsq(x.data(), x.size());
}

double norm2(const Vec& x) { return std::sqrt(norm2sq(x)); }

double squared_distance(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("squared_distance: length mismatch");
  return kernels::active().dist2(x.data(), y.data(), x.size());
}

double max_abs(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const Mat& m) {
  double r = 0.0;
  const double* p = m.data();
  for (std::size_t i = 0; i < m.rows() * m.cols(); ++i)
    r = std::max(r, std::fabs(p[i]));
  return r;
}

bool all_finite(const Vec& x) {
  return std::isfinite(kernels::active().sumsq(x.data(), x.size()));
}

bool is_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = 1.0 + max_abs(m);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > tol * scale) return false;
  return true;
}

namespace {

double offdiag_frobenius_sq(const Mat& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) acc += s(i, j) * s(i, j);
  return 2.0 * acc;
}

double frobenius_sq(const Mat& s) {
  double acc = 0.0;
  const double* p = s.data();
  for (std::size_t i = 0; i < s.rows() * s.cols(); ++i) acc += p[i] * p[i];
  return acc;
}

}  // namespace

SymEig sym_eig(const Mat& s_in) {
  if (s_in.rows() != s_in.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  if (!is_symmetric(s_in))
    throw std::invalid_argument("sym_eig: matrix must be symmetric");

  const std::size_t n = s_in.rows();
  const auto& k = kernels::active();
  Mat s = s_in;
  Mat v = Mat::identity(n);  // rows accumulate the transposed eigenbasis

  const double fro = std::sqrt(frobenius_sq(s));
  const double tol = 1e-12 * fro;

  if (fro > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
      const double off = std::sqrt(offdiag_frobenius_sq(s));
      if (off <= tol) {
        converged = true;
        break;
      }
      const double skip = tol / static_cast<double>(n);
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = s(p, q);
          if (std::fabs(apq) <= skip) continue;
          const double app = s(p, p);
          const double aqq = s(q, q);
          const double tau = (aqq - app) / (2.0 * apq);
          const double t =
              (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double sn = t * c;

          k.rot(s.row(p), s.row(q), c, sn, n);
          s(p, p) = app - t * apq;
          s(q, q) = aqq + t * apq;
          s(p, q) = 0.0;
          s(q, p) = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (i == p || i == q) continue;
            s(i, p) = s(p, i);
            s(i, q) = s(q, i);
          }
          k.rot(v.row(p), v.row(q), c, sn, n);
        }
      }
    }
    if (!converged && std::sqrt(offdiag_frobenius_sq(s)) > tol)
      throw std::runtime_error("sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return s(a, a) < s(b, b); });

  SymEig out;
  out.eigenvalues.resize(n);
  out.basis = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = s(idx[j], idx[j]);
    for (std::size_t i = 0; i < n; ++i) out.basis(i, j) = v(idx[j], i);
  }
  return out;
}

Mat sym_matexp(const Mat& s, double t) {
  const SymEig e = sym_eig(s);  // validates shape and symmetry
  const std::size_t n = s.rows();
  Mat scaled(n, n);  // scaled(i, k) = u(i, k) * exp(w_k t)
  for (std::size_t kcol = 0; kcol < n; ++kcol) {
    const double f = std::exp(e.eigenvalues[kcol] * t);
    for (std::size_t i = 0; i < n; ++i) scaled(i, kcol) = e.basis(i, kcol) * f;
  }
  Mat r(n, n);
  const auto& k = kernels::active();
  // r(i, j) = sum_k scaled(i, k) * u(j, k); both rows run over k
  for (std::size_t i = 0; i < n; ++i)
    k.matvec(e.basis.data(), n, n, scaled.row(i), r.row(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (r(i, j) + r(j, i));
      r(i, j) = avg;
      r(j, i) = avg;
    }
  return r;
}

double spectral_norm(const Mat& m) {
  if (m.rows() == m.cols() && is_symmetric(m)) {
    const SymEig e = sym_eig(m);
    return std::max(std::fabs(e.eigenvalues.front()), std::fabs(e.eigenvalues.back()));
  }
  // General case via the smaller Gram matrix.
  Mat g;
  if (m.rows() >= m.cols()) {
    g = gram_matrix(m);
  } else {
    Mat mt(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) mt(j, i) = m(i, j);
    g = gram_matrix(mt);
  }
  const SymEig e = sym_eig(g);
  return std::sqrt(std::max(0.0, e.eigenvalues.back()));
}

}  // namespace lassoflow

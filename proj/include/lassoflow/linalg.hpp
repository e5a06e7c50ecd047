#ifndef LASSOFLOW_LINALG_HPP
#define LASSOFLOW_LINALG_HPP

#include <cstddef>
#include <vector>

namespace lassoflow {

using Vec = std::vector<double>;

/// Dense row-major matrix. Dimensions are fixed at construction.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Vec matvec(const Mat& m, const Vec& x);             // m * x
Vec matvec_transposed(const Mat& m, const Vec& x);  // m^T * x
Mat gram_matrix(const Mat& a);                      // a^T * a

double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
double norm2sq(const Vec& x);
double squared_distance(const Vec& x, const Vec& y);
double max_abs(const Vec& x);
double max_abs(const Mat& m);
bool all_finite(const Vec& x);

/// max |m - m^T| <= tol * (1 + max|m|)
bool is_symmetric(const Mat& m, double tol = 1e-12);

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending, basis
/// columns are the matching orthonormal eigenvectors.
struct SymEig {
  Vec eigenvalues;
  Mat basis;
};

/// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius mass
/// falls below 1e-12 relative to the full Frobenius norm (at most 100
/// sweeps). Throws std::invalid_argument for non-square or asymmetric input.
SymEig sym_eig(const Mat& s);

/// exp(s * t) for symmetric s, via the eigendecomposition.
Mat sym_matexp(const Mat& s, double t);

/// Largest singular value. For symmetric input this is max |eigenvalue|.
double spectral_norm(const Mat& m);

}  // namespace lassoflow

#endif

#ifndef LASSOFLOW_KERNELS_HPP
#define LASSOFLOW_KERNELS_HPP

#include <cstddef>
#include <vector>

namespace lassoflow::kernels {

/// Table of the arithmetic inner loops everything else is built on.
/// scalar() is the portable reference; the wider variants must agree with it
/// (tests/test_kernels.cpp pins the tolerances). Pointers must not alias the
/// output unless noted.
struct Ops {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
  /// sum((x - y)^2)
  double (*dist2)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out = m * x, m row-major rows x cols; out must not alias x
  void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* out);
  /// out[i] = tanh(alpha * x[i])
  void (*tanh_scaled)(double alpha, const double* x, double* out, std::size_t n);
  /// out[i] = alpha / cosh^2(alpha * x[i]), evaluated without overflow
  void (*dtanh_scaled)(double alpha, const double* x, double* out, std::size_t n);
  /// out = x - eta * (gx - c + lambda * th)
  void (*descent_step)(const double* x, const double* gx, const double* c,
                       const double* th, double eta, double lambda,
                       double* out, std::size_t n);
  /// out = a - eta * (ga + lambda * d .* a)
  void (*adjoint_step)(const double* a, const double* ga, const double* d,
                       double eta, double lambda, double* out, std::size_t n);
  /// plane rotation, in place: (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
};

/// Portable reference implementation.
const Ops& scalar();

/// Variant selected once at first use from the CPU features of the running
/// machine. The LASSOFLOW_KERNELS environment variable (scalar|avx2|neon)
/// overrides the automatic choice.
const Ops& active();

/// Every variant usable in this process, scalar first, widest last.
const std::vector<const Ops*>& available();

}  // namespace lassoflow::kernels

#endif

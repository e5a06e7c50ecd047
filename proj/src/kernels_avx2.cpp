// AVX2+FMA variants of the inner-loop kernels. Compiled with -mavx2 -mfma and
// only entered after a runtime cpuid check (see kernels.cpp).

#include "lassoflow/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace lassoflow::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sumsq_(const double* x, std::size_t n) { return dot_(x, x, n); }

double dist2_(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void matvec_(const double* m, std::size_t rows, std::size_t cols,
             const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_(m + r * cols, x, cols);
}

// ---- vector exp / expm1 -----------------------------------------------
// exp by range reduction x = k*ln2 + r, |r| <= ln2/2, a 13-term Taylor series
// for e^r, and reassembly via two exponent-constructed powers of two so
// gradual underflow still works.

inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-745.1332191019412);
  x = _mm256_min_pd(x, hi);
  x = _mm256_max_pd(x, lo);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d kf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d r = _mm256_fnmadd_pd(kf, ln2_hi, x);
  r = _mm256_fnmadd_pd(kf, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.6059043836821613e-10);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868099e-09));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441720e-08));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985888e-07));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985893e-06));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587302e-05));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841e-04));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664e-02));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666666e-01));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^k = 2^k1 * 2^k2 with k1 = k >> 1 (both halves stay in normal range)
  const __m128i ki = _mm256_cvtpd_epi32(kf);
  const __m128i k1 = _mm_srai_epi32(ki, 1);
  const __m128i k2 = _mm_sub_epi32(ki, k1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52));
  return _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);
}

// expm1 for nonpositive arguments. Near zero a direct Taylor series of
// e^v - 1 avoids the cancellation in exp(v) - 1.
inline __m256d expm1_neg4(__m256d v) {
  const __m256d big = _mm256_sub_pd(exp4(v), _mm256_set1_pd(1.0));

  __m256d q = _mm256_set1_pd(1.6059043836821613e-10);  // 1/13!
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(2.0876756987868099e-09));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(2.5052108385441720e-08));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(2.7557319223985888e-07));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(2.7557319223985893e-06));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(2.4801587301587302e-05));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(1.9841269841269841e-04));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(1.3888888888888889e-03));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(8.3333333333333332e-03));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(4.1666666666666664e-02));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(1.6666666666666666e-01));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(0.5));
  q = _mm256_fmadd_pd(q, v, _mm256_set1_pd(1.0));
  const __m256d small = _mm256_mul_pd(v, q);

  const __m256d mask = _mm256_cmp_pd(v, _mm256_set1_pd(-0.35), _CMP_GT_OQ);
  return _mm256_blendv_pd(big, small, mask);
}

// tanh(z) = -em / (2 + em) with em = expm1(-2|z|), sign restored at the end.
inline __m256d tanh4(__m256d z) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d sign = _mm256_and_pd(z, sign_mask);
  const __m256d a = _mm256_andnot_pd(sign_mask, z);
  const __m256d em = expm1_neg4(_mm256_mul_pd(a, _mm256_set1_pd(-2.0)));
  const __m256d quot = _mm256_div_pd(em, _mm256_add_pd(em, _mm256_set1_pd(2.0)));
  // result = sign(z) * (-quot)
  return _mm256_xor_pd(quot, _mm256_xor_pd(sign, sign_mask));
}

void tanh_scaled_(double alpha, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, tanh4(_mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  if (i < n) {
    double buf[4] = {0.0, 0.0, 0.0, 0.0};
    std::memcpy(buf, x + i, (n - i) * sizeof(double));
    double res[4];
    _mm256_storeu_pd(res, tanh4(_mm256_mul_pd(va, _mm256_loadu_pd(buf))));
    std::memcpy(out + i, res, (n - i) * sizeof(double));
  }
}

inline __m256d dtanh4(double alpha, __m256d z) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d a = _mm256_andnot_pd(sign_mask, z);
  const __m256d q = exp4(_mm256_mul_pd(a, _mm256_set1_pd(-2.0)));
  const __m256d r = _mm256_add_pd(q, _mm256_set1_pd(1.0));
  const __m256d frac = _mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), q),
                                     _mm256_mul_pd(r, r));
  return _mm256_mul_pd(_mm256_set1_pd(alpha), frac);
}

void dtanh_scaled_(double alpha, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, dtanh4(alpha, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  if (i < n) {
    double buf[4] = {0.0, 0.0, 0.0, 0.0};
    std::memcpy(buf, x + i, (n - i) * sizeof(double));
    double res[4];
    _mm256_storeu_pd(res, dtanh4(alpha, _mm256_mul_pd(va, _mm256_loadu_pd(buf))));
    std::memcpy(out + i, res, (n - i) * sizeof(double));
  }
}

void descent_step_(const double* x, const double* gx, const double* c,
                   const double* th, double eta, double lambda, double* out,
                   std::size_t n) {
  const __m256d vl = _mm256_set1_pd(lambda);
  const __m256d ve = _mm256_set1_pd(eta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d g = _mm256_sub_pd(_mm256_loadu_pd(gx + i), _mm256_loadu_pd(c + i));
    g = _mm256_fmadd_pd(vl, _mm256_loadu_pd(th + i), g);
    _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(ve, g, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i)
    out[i] = std::fma(-eta, std::fma(lambda, th[i], gx[i] - c[i]), x[i]);
}

void adjoint_step_(const double* a, const double* ga, const double* d,
                   double eta, double lambda, double* out, std::size_t n) {
  const __m256d vl = _mm256_set1_pd(lambda);
  const __m256d ve = _mm256_set1_pd(eta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    __m256d g = _mm256_fmadd_pd(vl, _mm256_mul_pd(_mm256_loadu_pd(d + i), av),
                                _mm256_loadu_pd(ga + i));
    _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(ve, g, av));
  }
  for (; i < n; ++i)
    out[i] = std::fma(-eta, std::fma(lambda, d[i] * a[i], ga[i]), a[i]);
}

void rot_(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, xv, _mm256_mul_pd(vs, yv)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, xv, _mm256_mul_pd(vc, yv)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = std::fma(c, xi, -(s * yi));
    y[i] = std::fma(s, xi, c * yi);
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops table = {
      "avx2",         dot_,         sumsq_,        dist2_, axpy_,
      matvec_,        tanh_scaled_, dtanh_scaled_, descent_step_,
      adjoint_step_,  rot_,
  };
  return &table;
}

}  // namespace lassoflow::kernels

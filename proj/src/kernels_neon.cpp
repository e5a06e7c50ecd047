// NEON (ASIMD) variants for aarch64, mirroring the AVX2 implementations
// two lanes at a time.

#include "lassoflow/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

namespace lassoflow::kernels {
namespace {

double dot_(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  if (i + 2 <= n) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    i += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sumsq_(const double* x, std::size_t n) { return dot_(x, x, n); }

double dist2_(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void matvec_(const double* m, std::size_t rows, std::size_t cols,
             const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_(m + r * cols, x, cols);
}

inline float64x2_t exp2l(float64x2_t x) {
  x = vminq_f64(x, vdupq_n_f64(709.782712893384));
  x = vmaxq_f64(x, vdupq_n_f64(-745.1332191019412));

  const float64x2_t kf =
      vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634)));
  float64x2_t r = vfmsq_f64(x, kf, vdupq_n_f64(6.93147180369123816490e-01));
  r = vfmsq_f64(r, kf, vdupq_n_f64(1.90821492927058770002e-10));

  float64x2_t p = vdupq_n_f64(1.6059043836821613e-10);
  p = vfmaq_f64(vdupq_n_f64(2.0876756987868099e-09), p, r);
  p = vfmaq_f64(vdupq_n_f64(2.5052108385441720e-08), p, r);
  p = vfmaq_f64(vdupq_n_f64(2.7557319223985888e-07), p, r);
  p = vfmaq_f64(vdupq_n_f64(2.7557319223985893e-06), p, r);
  p = vfmaq_f64(vdupq_n_f64(2.4801587301587302e-05), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.9841269841269841e-04), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.3888888888888889e-03), p, r);
  p = vfmaq_f64(vdupq_n_f64(8.3333333333333332e-03), p, r);
  p = vfmaq_f64(vdupq_n_f64(4.1666666666666664e-02), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.6666666666666666e-01), p, r);
  p = vfmaq_f64(vdupq_n_f64(0.5), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);
  p = vfmaq_f64(vdupq_n_f64(1.0), p, r);

  const int64x2_t k = vcvtq_s64_f64(kf);
  const int64x2_t k1 = vshrq_n_s64(k, 1);
  const int64x2_t k2 = vsubq_s64(k, k1);
  const int64x2_t bias = vdupq_n_s64(1023);
  const float64x2_t s1 =
      vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(k1, bias), 52));
  const float64x2_t s2 =
      vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(k2, bias), 52));
  return vmulq_f64(vmulq_f64(p, s1), s2);
}

inline float64x2_t expm1_neg2l(float64x2_t v) {
  const float64x2_t big = vsubq_f64(exp2l(v), vdupq_n_f64(1.0));

  float64x2_t q = vdupq_n_f64(1.6059043836821613e-10);
  q = vfmaq_f64(vdupq_n_f64(2.0876756987868099e-09), q, v);
  q = vfmaq_f64(vdupq_n_f64(2.5052108385441720e-08), q, v);
  q = vfmaq_f64(vdupq_n_f64(2.7557319223985888e-07), q, v);
  q = vfmaq_f64(vdupq_n_f64(2.7557319223985893e-06), q, v);
  q = vfmaq_f64(vdupq_n_f64(2.4801587301587302e-05), q, v);
  q = vfmaq_f64(vdupq_n_f64(1.9841269841269841e-04), q, v);
  q = vfmaq_f64(vdupq_n_f64(1.3888888888888889e-03), q, v);
  q = vfmaq_f64(vdupq_n_f64(8.3333333333333332e-03), q, v);
  q = vfmaq_f64(vdupq_n_f64(4.1666666666666664e-02), q, v);
  q = vfmaq_f64(vdupq_n_f64(1.6666666666666666e-01), q, v);
  q = vfmaq_f64(vdupq_n_f64(0.5), q, v);
  q = vfmaq_f64(vdupq_n_f64(1.0), q, v);
  const float64x2_t small = vmulq_f64(v, q);

  const uint64x2_t mask = vcgtq_f64(v, vdupq_n_f64(-0.35));
  return vbslq_f64(mask, small, big);
}

inline float64x2_t tanh2l(float64x2_t z) {
  const uint64x2_t sign_mask = vdupq_n_u64(0x8000000000000000ull);
  const uint64x2_t sign = vandq_u64(vreinterpretq_u64_f64(z), sign_mask);
  const float64x2_t a = vabsq_f64(z);
  const float64x2_t em = expm1_neg2l(vmulq_f64(a, vdupq_n_f64(-2.0)));
  const float64x2_t quot = vdivq_f64(em, vaddq_f64(em, vdupq_n_f64(2.0)));
  const uint64x2_t flipped =
      veorq_u64(vreinterpretq_u64_f64(quot), veorq_u64(sign, sign_mask));
  return vreinterpretq_f64_u64(flipped);
}

void tanh_scaled_(double alpha, const double* x, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, tanh2l(vmulq_f64(va, vld1q_f64(x + i))));
  if (i < n) {
    double buf[2] = {x[i], 0.0};
    double res[2];
    vst1q_f64(res, tanh2l(vmulq_f64(va, vld1q_f64(buf))));
    out[i] = res[0];
  }
}

inline float64x2_t dtanh2l(double alpha, float64x2_t z) {
  const float64x2_t a = vabsq_f64(z);
  const float64x2_t q = exp2l(vmulq_f64(a, vdupq_n_f64(-2.0)));
  const float64x2_t r = vaddq_f64(q, vdupq_n_f64(1.0));
  const float64x2_t frac =
      vdivq_f64(vmulq_f64(vdupq_n_f64(4.0), q), vmulq_f64(r, r));
  return vmulq_f64(vdupq_n_f64(alpha), frac);
}

void dtanh_scaled_(double alpha, const double* x, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, dtanh2l(alpha, vmulq_f64(va, vld1q_f64(x + i))));
  if (i < n) {
    double buf[2] = {x[i], 0.0};
    double res[2];
    vst1q_f64(res, dtanh2l(alpha, vmulq_f64(va, vld1q_f64(buf))));
    out[i] = res[0];
  }
}

void descent_step_(const double* x, const double* gx, const double* c,
                   const double* th, double eta, double lambda, double* out,
                   std::size_t n) {
  const float64x2_t vl = vdupq_n_f64(lambda);
  const float64x2_t ve = vdupq_n_f64(eta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t g = vsubq_f64(vld1q_f64(gx + i), vld1q_f64(c + i));
    g = vfmaq_f64(g, vl, vld1q_f64(th + i));
    vst1q_f64(out + i, vfmsq_f64(vld1q_f64(x + i), ve, g));
  }
  for (; i < n; ++i)
    out[i] = std::fma(-eta, std::fma(lambda, th[i], gx[i] - c[i]), x[i]);
}

void adjoint_step_(const double* a, const double* ga, const double* d,
                   double eta, double lambda, double* out, std::size_t n) {
  const float64x2_t vl = vdupq_n_f64(lambda);
  const float64x2_t ve = vdupq_n_f64(eta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t av = vld1q_f64(a + i);
    float64x2_t g =
        vfmaq_f64(vld1q_f64(ga + i), vl, vmulq_f64(vld1q_f64(d + i), av));
    vst1q_f64(out + i, vfmsq_f64(av, ve, g));
  }
  for (; i < n; ++i)
    out[i] = std::fma(-eta, std::fma(lambda, d[i] * a[i], ga[i]), a[i]);
}

void rot_(double* x, double* y, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const float64x2_t yv = vld1q_f64(y + i);
    vst1q_f64(x + i, vfmaq_f64(vnegq_f64(vmulq_f64(vs, yv)), vc, xv));
    vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vc, yv), vs, xv));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = std::fma(c, xi, -(s * yi));
    y[i] = std::fma(s, xi, c * yi);
  }
}

}  // namespace

const Ops* neon_ops() {
  static const Ops table = {
      "neon",         dot_,         sumsq_,        dist2_, axpy_,
      matvec_,        tanh_scaled_, dtanh_scaled_, descent_step_,
      adjoint_step_,  rot_,
  };
  return &table;
}

}  // namespace lassoflow::kernels

#endif  // __aarch64__

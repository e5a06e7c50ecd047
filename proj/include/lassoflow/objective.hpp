#ifndef LASSOFLOW_OBJECTIVE_HPP
#define LASSOFLOW_OBJECTIVE_HPP

#include "lassoflow/problem.hpp"

namespace lassoflow {

/// Regularization weight and sharpness of the smooth |x| surrogate.
struct SmoothLassoParams {
  double lambda;
  double alpha;
  SmoothLassoParams(double lambda_, double alpha_);
};

/// log(exp(a x) + exp(-a x)) / a, a smooth stand-in for |x| that tightens as
/// alpha grows. Evaluated as |x| + log1p(exp(-2 a |x|)) / a; the direct form
/// overflows once a|x| exceeds ~350.
double soft_abs(double alpha, double x);

// Both objectives use the least-squares term 0.5 * ||y - a x||^2 so that the
// gradient of the smooth energy is a^T(a x - y) + lambda tanh(alpha x), the
// form the flow integrates and the linearization differentiates.

/// 0.5 * ||y - a x||^2 + lambda * ||x||_1
double lasso_objective(const Vec& x, const ProblemInstance& inst, const Vec& y,
                       double lambda);

/// 0.5 * ||y - a x||^2 + lambda * sum_i soft_abs(alpha, x_i)
double smooth_energy(const Vec& x, const ProblemInstance& inst, const Vec& y,
                     const SmoothLassoParams& params);

/// a^T (a x - y) + lambda * tanh(alpha x)
Vec smooth_energy_grad(const Vec& x, const ProblemInstance& inst, const Vec& y,
                       const SmoothLassoParams& params);

/// Diagonal of the Jacobian of tanh(alpha x) at xstar: alpha / cosh^2(alpha x_i).
/// Every entry is strictly positive (up to double underflow near a|x| ~ 370).
Vec tanh_jacobian_diag(const Vec& xstar, double alpha);

/// ||smooth_energy_grad(x)||_2; zero exactly at a stationary point of the flow.
double equilibrium_residual(const Vec& x, const ProblemInstance& inst,
                            const Vec& y, const SmoothLassoParams& params);

}  // namespace lassoflow

#endif

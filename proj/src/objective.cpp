#include "lassoflow/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "lassoflow/kernels.hpp"

namespace lassoflow {

SmoothLassoParams::SmoothLassoParams(double lambda_, double alpha_)
    : lambda(lambda_), alpha(alpha_) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("SmoothLassoParams: lambda must be positive");
  if (!(alpha > 0.0))
    throw std::invalid_argument("SmoothLassoParams: alpha must be positive");
}

double soft_abs(double alpha, double x) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("soft_abs: alpha must be positive");
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * alpha * ax)) / alpha;
}

namespace {

double half_residual_sq(const Vec& x, const ProblemInstance& inst, const Vec& y) {
  if (x.size() != inst.n() || y.size() != inst.m())
    throw std::invalid_argument("objective: dimension mismatch");
  const Vec ax = matvec(inst.a(), x);
  return 0.5 * squared_distance(y, ax);
}

}  // namespace

double lasso_objective(const Vec& x, const ProblemInstance& inst, const Vec& y,
                       double lambda) {
  double l1 = 0.0;
  for (double v : x) l1 += std::fabs(v);
  return half_residual_sq(x, inst, y) + lambda * l1;
}

double smooth_energy(const Vec& x, const ProblemInstance& inst, const Vec& y,
                     const SmoothLassoParams& params) {
  double penalty = 0.0;
  for (double v : x) penalty += soft_abs(params.alpha, v);
  return half_residual_sq(x, inst, y) + params.lambda * penalty;
}

Vec smooth_energy_grad(const Vec& x, const ProblemInstance& inst, const Vec& y,
                       const SmoothLassoParams& params) {
  if (x.size() != inst.n() || y.size() != inst.m())
    throw std::invalid_argument("smooth_energy_grad: dimension mismatch");
  Vec g = matvec(inst.gram(), x);
  const Vec aty = matvec_transposed(inst.a(), y);
  Vec th(x.size());
  kernels::active().tanh_scaled(params.alpha, x.data(), th.data(), x.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = g[i] - aty[i] + params.lambda * th[i];
  return g;
}

Vec tanh_jacobian_diag(const Vec& xstar, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("tanh_jacobian_diag: alpha must be positive");
  Vec d(xstar.size());
  kernels::active().dtanh_scaled(alpha, xstar.data(), d.data(), xstar.size());
  return d;
}

double equilibrium_residual(const Vec& x, const ProblemInstance& inst,
                            const Vec& y, const SmoothLassoParams& params) {
  return norm2(smooth_energy_grad(x, inst, y, params));
}

}  // namespace lassoflow

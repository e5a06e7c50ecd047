#ifndef LASSOFLOW_ANALYSIS_HPP
#define LASSOFLOW_ANALYSIS_HPP

#include "lassoflow/flow.hpp"

namespace lassoflow {

/// Equilibrium estimate with its gradient-norm residual. converged is false
/// when the residual stays above 1e-2 (the result is still returned).
struct Equilibrium {
  Vec xstar;
  double residual;
  bool converged;
};

/// Long-horizon Euler integration from x0 = 0 under constant regularization.
/// The default horizon/bins match the experiment protocol; tighten them when
/// a smaller residual is needed.
Equilibrium find_equilibrium(const ProblemInstance& inst, const Vec& y,
                             const SmoothLassoParams& params,
                             double horizon = 4.0, std::size_t bins = 5000);

/// Local linear model around an equilibrium: the error e = x - xstar evolves
/// as e' = -b e with b = a^T a + lambda J(xstar), J the diagonal Jacobian of
/// tanh(alpha x). omegas are the eigenvalues of b ascending; the smallest one
/// sets the local convergence rate exp(-omega_1 t). omega1_lower_bound is
/// l_min(a^T a) + lambda min_i J_ii.
struct LinearizationReport {
  Vec xstar;
  Mat b;
  Vec omegas;
  Mat basis;
  double omega1_lower_bound;
  double omega1() const { return omegas.front(); }
};

LinearizationReport linearize(const ProblemInstance& inst,
                              const SmoothLassoParams& params, const Vec& xstar);

/// exp(-b t) e0 evaluated through the eigendecomposition of b.
Vec linearized_error(const LinearizationReport& report, const Vec& e0, double t);

/// rho(t_k) = ||x(t_k) - xstar|| / ||x(0) - xstar|| next to the linear-model
/// prediction exp(-omega1 t_k). Requires ||x(0) - xstar|| > 1e-12.
struct RatioCurve {
  Vec times;
  Vec rho;
  Vec theory;
};

RatioCurve error_ratio_curve(const Trajectory& traj, const Vec& xstar,
                             double omega1);

/// Least-squares slope of log(values) against times over [t_lo, t_hi],
/// ignoring samples at or below floor. Throws when fewer than two samples
/// qualify.
double fit_log_slope(const Vec& times, const Vec& values, double t_lo,
                     double t_hi, double floor = 1e-12);

/// Per-lambda averages over fresh (signal, noise) trials at fixed sensing
/// matrix: terminal squared error at the config horizon (the asymptotic-MSE
/// proxy), the regularization force ||lambda tanh(alpha xstar)||^2, and the
/// smallest linearization eigenvalue. Trial i uses rng.substream(i), so every
/// lambda sees the same data.
struct SweepRow {
  double lambda;
  double mse_inf;
  double force_norm;
  double omega1;
};

std::vector<SweepRow> lambda_sweep(const ProblemInstance& inst,
                                   const std::vector<double>& lambdas,
                                   double alpha, const SolverConfig& cfg,
                                   std::size_t trials, const RngStream& rng);

}  // namespace lassoflow

#endif

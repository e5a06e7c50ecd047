#include "lassoflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lassoflow/kernels.hpp"

namespace lassoflow {

Equilibrium find_equilibrium(const ProblemInstance& inst, const Vec& y,
                             const SmoothLassoParams& params, double horizon,
                             std::size_t bins) {
  const SolverConfig cfg(horizon, bins, bins);  // terminal state only
  const Vec x0(inst.n(), 0.0);
  Trajectory traj = euler_solve_const(inst, y, params.lambda, params.alpha, cfg, x0);
  Equilibrium eq;
  eq.xstar = std::move(traj.terminal);
  eq.residual = equilibrium_residual(eq.xstar, inst, y, params);
  eq.converged = eq.residual <= 1e-2;
  return eq;
}

LinearizationReport linearize(const ProblemInstance& inst,
                              const SmoothLassoParams& params, const Vec& xstar) {
  if (xstar.size() != inst.n())
    throw std::invalid_argument("linearize: xstar length mismatch");
  if (!all_finite(xstar))
    throw std::invalid_argument("linearize: xstar must be finite");

  const Vec jac = tanh_jacobian_diag(xstar, params.alpha);
  LinearizationReport report;
  report.xstar = xstar;
  report.b = inst.gram();
  for (std::size_t i = 0; i < inst.n(); ++i)
    report.b(i, i) += params.lambda * jac[i];

  SymEig e = sym_eig(report.b);
  report.omegas = std::move(e.eigenvalues);
  report.basis = std::move(e.basis);
  report.omega1_lower_bound =
      inst.gram_eig_min() + params.lambda * *std::min_element(jac.begin(), jac.end());
  return report;
}

Vec linearized_error(const LinearizationReport& report, const Vec& e0, double t) {
  if (e0.size() != report.omegas.size())
    throw std::invalid_argument("linearized_error: e0 length mismatch");
  // exp(-b t) e0 = u diag(exp(-w t)) u^T e0
  const std::size_t n = e0.size();
  const auto& k = kernels::active();
  Vec ut_e0(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += report.basis(i, j) * e0[i];
    ut_e0[j] = acc * std::exp(-report.omegas[j] * t);
  }
  Vec out(n);
  k.matvec(report.basis.data(), n, n, ut_e0.data(), out.data());
  return out;
}

RatioCurve error_ratio_curve(const Trajectory& traj, const Vec& xstar,
                             double omega1) {
  if (traj.states.empty())
    throw std::invalid_argument("error_ratio_curve: empty trajectory");
  const double denom = std::sqrt(squared_distance(traj.states.front(), xstar));
  if (!(denom > 1e-12))
    throw std::invalid_argument(
        "error_ratio_curve: initial state coincides with the equilibrium");

  RatioCurve curve;
  curve.times = traj.times;
  curve.rho.resize(traj.states.size());
  curve.theory.resize(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    curve.rho[i] = std::sqrt(squared_distance(traj.states[i], xstar)) / denom;
    curve.theory[i] = std::exp(-omega1 * traj.times[i]);
  }
  return curve;
}

double fit_log_slope(const Vec& times, const Vec& values, double t_lo,
                     double t_hi, double floor) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_log_slope: length mismatch");
  double st = 0.0;
  double sy = 0.0;
  double stt = 0.0;
  double sty = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi || !(values[i] > floor)) continue;
    const double ly = std::log(values[i]);
    st += times[i];
    sy += ly;
    stt += times[i] * times[i];
    sty += times[i] * ly;
    ++count;
  }
  if (count < 2)
    throw std::runtime_error("fit_log_slope: fewer than two usable samples");
  const double denom = static_cast<double>(count) * stt - st * st;
  return (static_cast<double>(count) * sty - st * sy) / denom;
}

std::vector<SweepRow> lambda_sweep(const ProblemInstance& inst,
                                   const std::vector<double>& lambdas,
                                   double alpha, const SolverConfig& cfg,
                                   std::size_t trials, const RngStream& rng) {
  if (trials == 0)
    throw std::invalid_argument("lambda_sweep: trials must be positive");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("lambda_sweep: lambdas must be positive");

  const auto& k = kernels::active();
  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size());
  Vec th(inst.n());
  for (double lambda : lambdas) {
    const SmoothLassoParams params(lambda, alpha);
    double mse_acc = 0.0;
    double force_acc = 0.0;
    double omega_acc = 0.0;
    for (std::size_t trial = 1; trial <= trials; ++trial) {
      RngStream r = rng.substream(trial);
      const Vec s = sample_signal(r, inst.n(), inst.p());
      const Observation obs = observe(inst, s, r);
      Trajectory traj;
      try {
        traj = euler_solve_const(inst, obs.y, lambda, alpha,
                                 SolverConfig(cfg.horizon, cfg.bins, cfg.bins),
                                 Vec(inst.n(), 0.0));
      } catch (const DivergenceError& e) {
        throw DivergenceError(e.step, static_cast<long>(trial));
      }
      const Vec& xstar = traj.terminal;
      mse_acc += squared_error(xstar, s);
      k.tanh_scaled(alpha, xstar.data(), th.data(), xstar.size());
      force_acc += lambda * lambda * k.sumsq(th.data(), th.size());
      omega_acc += linearize(inst, params, xstar).omega1();
    }
    const double inv = 1.0 / static_cast<double>(trials);
    rows.push_back(SweepRow{lambda, mse_acc * inv, force_acc * inv, omega_acc * inv});
  }
  return rows;
}

}  // namespace lassoflow

#include "lassoflow/flow.hpp"

#include <cmath>

#include "lassoflow/kernels.hpp"

namespace lassoflow {

DivergenceError::DivergenceError(std::size_t step_, long trial_)
    : std::runtime_error(trial_ < 0
                             ? "non-finite state at step " + std::to_string(step_)
                             : "non-finite state at step " + std::to_string(step_) +
                                   " of trial " + std::to_string(trial_)),
      step(step_),
      trial(trial_) {}

SolverConfig::SolverConfig(double horizon_, std::size_t bins_, std::size_t record_stride_)
    : horizon(horizon_), bins(bins_), record_stride(record_stride_) {
  if (!(horizon > 0.0)) throw std::invalid_argument("SolverConfig: horizon must be positive");
  if (bins == 0) throw std::invalid_argument("SolverConfig: bins must be positive");
  if (record_stride == 0) {
    record_stride = std::max<std::size_t>(1, bins / 500);
    while (bins % record_stride != 0) --record_stride;
  }
  if (bins % record_stride != 0)
    throw std::invalid_argument("SolverConfig: record_stride must divide bins");
}

double stability_margin(const ProblemInstance& inst, double lambda_max,
                        double alpha, double eta) {
  return 2.0 / (inst.gram_eig_max() + lambda_max * alpha) - eta;
}

namespace {

// Shared Euler core. lam(t) supplies the raw schedule value (clamped at 0
// here); rec(step, t, x) sees every recorded tick including step 0.
template <class LambdaFn, class Recorder>
void integrate(const ProblemInstance& inst, const Vec& aty, LambdaFn&& lam,
               double alpha, const SolverConfig& cfg, const Vec& x0,
               Recorder&& rec, double* lambda_max_seen) {
  const auto& k = kernels::active();
  const std::size_t n = inst.n();
  const double eta = cfg.eta();
  Vec x = x0;
  Vec gx(n);
  Vec th(n);
  Vec xn(n);
  double lmax = 0.0;

  rec(std::size_t{0}, 0.0, x);
  for (std::size_t step = 0; step < cfg.bins; ++step) {
    const double t = eta * static_cast<double>(step);
    const double lambda = std::max(0.0, lam(t));
    lmax = std::max(lmax, lambda);
    k.matvec(inst.gram().data(), n, n, x.data(), gx.data());
    k.tanh_scaled(alpha, x.data(), th.data(), n);
    k.descent_step(x.data(), gx.data(), aty.data(), th.data(), eta, lambda,
                   xn.data(), n);
    if (!std::isfinite(k.sumsq(xn.data(), n))) throw DivergenceError(step + 1);
    x.swap(xn);
    if ((step + 1) % cfg.record_stride == 0)
      rec(step + 1, eta * static_cast<double>(step + 1), x);
  }
  if (lambda_max_seen) *lambda_max_seen = lmax;
}

template <class LambdaFn>
Trajectory solve_impl(const ProblemInstance& inst, const Vec& y, LambdaFn&& lam,
                      double alpha, const SolverConfig& cfg, const Vec& x0) {
  if (y.size() != inst.m()) throw std::invalid_argument("euler_solve: y length mismatch");
  if (x0.size() != inst.n()) throw std::invalid_argument("euler_solve: x0 length mismatch");
  const Vec aty = matvec_transposed(inst.a(), y);

  Trajectory traj;
  traj.times.reserve(cfg.bins / cfg.record_stride + 1);
  traj.states.reserve(cfg.bins / cfg.record_stride + 1);
  double lmax = 0.0;
  integrate(
      inst, aty, lam, alpha, cfg, x0,
      [&](std::size_t, double t, const Vec& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
      },
      &lmax);
  traj.terminal = traj.states.back();
  traj.stability_margin = stability_margin(inst, lmax, alpha, cfg.eta());
  traj.stability_warning = traj.stability_margin < 0.0;
  return traj;
}

}  // namespace

Trajectory euler_solve(const ProblemInstance& inst, const Vec& y,
                       const Schedule& schedule, double alpha,
                       const SolverConfig& cfg, const Vec& x0) {
  return solve_impl(inst, y, [&](double t) { return schedule.eval(t); }, alpha,
                    cfg, x0);
}

Trajectory euler_solve_const(const ProblemInstance& inst, const Vec& y,
                             double lambda, double alpha,
                             const SolverConfig& cfg, const Vec& x0) {
  return solve_impl(inst, y, [lambda](double) { return lambda; }, alpha, cfg, x0);
}

MseCurve estimate_mse_curve(const ProblemInstance& inst, const Schedule& schedule,
                            double alpha, const SolverConfig& cfg,
                            std::size_t trials, const RngStream& rng) {
  if (trials == 0)
    throw std::invalid_argument("estimate_mse_curve: trials must be positive");
  const std::size_t ticks = cfg.bins / cfg.record_stride + 1;
  MseCurve curve;
  curve.times.resize(ticks);
  curve.mse.assign(ticks, 0.0);
  curve.trials = trials;

  const auto& k = kernels::active();
  const Vec x0(inst.n(), 0.0);
  for (std::size_t trial = 1; trial <= trials; ++trial) {
    RngStream r = rng.substream(trial);
    const Vec s = sample_signal(r, inst.n(), inst.p());
    const Observation obs = observe(inst, s, r);
    const Vec aty = matvec_transposed(inst.a(), obs.y);
    std::size_t slot = 0;
    try {
      integrate(
          inst, aty, [&](double t) { return schedule.eval(t); }, alpha, cfg, x0,
          [&](std::size_t, double t, const Vec& x) {
            curve.times[slot] = t;
            curve.mse[slot] += k.dist2(x.data(), s.data(), x.size());
            ++slot;
          },
          nullptr);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.step, static_cast<long>(trial));
    }
  }
  const double inv = 1.0 / static_cast<double>(trials);
  for (double& v : curve.mse) v *= inv;
  return curve;
}

}  // namespace lassoflow

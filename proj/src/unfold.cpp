#include "lassoflow/unfold.hpp"

#include <cmath>
#include <stdexcept>

#include "lassoflow/kernels.hpp"

namespace lassoflow {

void TrainConfig::validate() const {
  if (!(target_time > 0.0))
    throw std::invalid_argument("TrainConfig: target_time must be positive");
  if (unfold_bins == 0) throw std::invalid_argument("TrainConfig: unfold_bins must be positive");
  if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be positive");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("TrainConfig: adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw std::invalid_argument("TrainConfig: adam_eps must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("TrainConfig: alpha must be positive");
  if (rbf_count == 0) throw std::invalid_argument("TrainConfig: rbf_count must be positive");
  if (!(rbf_beta > 0.0)) throw std::invalid_argument("TrainConfig: rbf_beta must be positive");
}

TrainState TrainState::init(std::size_t size, double weight_value) {
  TrainState st;
  st.w.assign(size, weight_value);
  st.adam_m.assign(size, 0.0);
  st.adam_v.assign(size, 0.0);
  return st;
}

MiniBatch make_minibatch(const ProblemInstance& inst, std::size_t k, RngStream& rng) {
  if (k == 0) throw std::invalid_argument("make_minibatch: batch size must be positive");
  MiniBatch batch;
  batch.pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Vec s = sample_signal(rng, inst.n(), inst.p());
    batch.pairs.push_back(observe(inst, s, rng));
  }
  return batch;
}

namespace {

// Control values on the unfold grid: raw schedule samples, the clamped values
// fed to the recursion, and the chain-rule gate (0 where the clamp is active).
struct ControlGrid {
  Vec values;
  Vec gates;
  Mat basis;  // bins x rbf_count, basis(k, i) = phi(eta k - c_i)
};

ControlGrid sample_schedule(const RBFSchedule& sched, std::size_t bins, double eta,
                            bool clamp_nonneg) {
  ControlGrid grid;
  grid.values.resize(bins);
  grid.gates.resize(bins);
  grid.basis = Mat(bins, sched.size());
  for (std::size_t k = 0; k < bins; ++k) {
    const double t = eta * static_cast<double>(k);
    sched.basis(t, grid.basis.row(k));
    // plain ordered sum so the value matches RBFSchedule::eval bit for bit
    double raw = 0.0;
    for (std::size_t i = 0; i < sched.size(); ++i)
      raw += sched.weights()[i] * grid.basis.row(k)[i];
    if (clamp_nonneg && !(raw > 0.0)) {
      grid.values[k] = 0.0;
      grid.gates[k] = 0.0;
    } else {
      grid.values[k] = raw;
      grid.gates[k] = 1.0;
    }
  }
  return grid;
}

void check_stability(const ProblemInstance& inst, const ControlGrid& grid,
                     const TrainConfig& cfg) {
  double lmax = 0.0;
  for (double v : grid.values) lmax = std::max(lmax, v);
  if (stability_margin(inst, lmax, cfg.alpha, cfg.eta()) <= 0.0)
    throw std::domain_error(
        "unfold: Euler step exceeds the stability bound for this schedule");
}

// Forward Euler pass for one batch element. States are checkpointed into
// `states` ((bins + 1) x n, row k holding x^(k)). Returns the terminal
// squared error against obs.s.
double forward_element(const ProblemInstance& inst, const Observation& obs,
                       const ControlGrid& grid, const TrainConfig& cfg,
                       long element, Vec& states, Vec& gx, Vec& th) {
  const auto& k = kernels::active();
  const std::size_t n = inst.n();
  const std::size_t bins = cfg.unfold_bins;
  const double eta = cfg.eta();
  const Vec aty = matvec_transposed(inst.a(), obs.y);

  double* x = states.data();
  std::fill(x, x + n, 0.0);
  for (std::size_t step = 0; step < bins; ++step) {
    double* xk = states.data() + step * n;
    double* xn = xk + n;
    k.matvec(inst.gram().data(), n, n, xk, gx.data());
    k.tanh_scaled(cfg.alpha, xk, th.data(), n);
    k.descent_step(xk, gx.data(), aty.data(), th.data(), eta, grid.values[step],
                   xn, n);
    if (!std::isfinite(k.sumsq(xn, n))) throw DivergenceError(step + 1, element);
  }
  return k.dist2(states.data() + bins * n, obs.s.data(), n);
}

// Reverse adjoint pass over the checkpointed states; adds this element's
// dL/dlambda_k (seeded with scale * (x^(N) - s)) into gu.
void backward_element(const ProblemInstance& inst, const Observation& obs,
                      const ControlGrid& grid, const TrainConfig& cfg,
                      double scale, const Vec& states, Vec& gu, Vec& a, Vec& an,
                      Vec& ga, Vec& th, Vec& d) {
  const auto& k = kernels::active();
  const std::size_t n = inst.n();
  const std::size_t bins = cfg.unfold_bins;
  const double eta = cfg.eta();

  const double* xN = states.data() + bins * n;
  for (std::size_t i = 0; i < n; ++i) a[i] = scale * (xN[i] - obs.s[i]);

  for (std::size_t step = bins; step-- > 0;) {
    const double* xk = states.data() + step * n;
    k.tanh_scaled(cfg.alpha, xk, th.data(), n);
    gu[step] -= eta * k.dot(th.data(), a.data(), n);
    if (step == 0) break;  // a^(0) is never used
    k.dtanh_scaled(cfg.alpha, xk, d.data(), n);
    k.matvec(inst.gram().data(), n, n, a.data(), ga.data());
    k.adjoint_step(a.data(), ga.data(), d.data(), eta, grid.values[step], an.data(), n);
    a.swap(an);
  }
}

struct LossAndGrad {
  double loss;
  Vec grad;
};

LossAndGrad loss_and_grad(const ProblemInstance& inst, const MiniBatch& batch,
                          const RBFSchedule& sched, const TrainConfig& cfg) {
  cfg.validate();
  if (batch.pairs.empty()) throw std::invalid_argument("unfold: empty mini-batch");
  const std::size_t n = inst.n();
  const std::size_t bins = cfg.unfold_bins;
  const double kinv = 1.0 / static_cast<double>(batch.pairs.size());

  const ControlGrid grid = sample_schedule(sched, bins, cfg.eta(), true);
  check_stability(inst, grid, cfg);

  Vec states((bins + 1) * n);
  Vec gx(n), th(n), d(n), a(n), an(n), ga(n);
  Vec gu(bins, 0.0);
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.pairs.size(); ++e) {
    loss += forward_element(inst, batch.pairs[e], grid, cfg,
                            static_cast<long>(e + 1), states, gx, th);
    backward_element(inst, batch.pairs[e], grid, cfg, 2.0 * kinv, states, gu, a,
                     an, ga, th, d);
  }
  loss *= kinv;

  Vec grad(sched.size(), 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    const double g = gu[k] * grid.gates[k];
    if (g != 0.0)
      kernels::active().axpy(g, grid.basis.row(k), grad.data(), sched.size());
  }
  return LossAndGrad{loss, std::move(grad)};
}

}  // namespace

double unfold_loss(const ProblemInstance& inst, const MiniBatch& batch,
                   const RBFSchedule& sched, const TrainConfig& cfg) {
  cfg.validate();
  if (batch.pairs.empty()) throw std::invalid_argument("unfold: empty mini-batch");
  const std::size_t n = inst.n();
  const ControlGrid grid = sample_schedule(sched, cfg.unfold_bins, cfg.eta(), true);
  check_stability(inst, grid, cfg);

  Vec states((cfg.unfold_bins + 1) * n);
  Vec gx(n), th(n);
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.pairs.size(); ++e)
    loss += forward_element(inst, batch.pairs[e], grid, cfg,
                            static_cast<long>(e + 1), states, gx, th);
  return loss / static_cast<double>(batch.pairs.size());
}

Vec unfold_grad(const ProblemInstance& inst, const MiniBatch& batch,
                const RBFSchedule& sched, const TrainConfig& cfg) {
  return loss_and_grad(inst, batch, sched, cfg).grad;
}

TrainState adam_step(TrainState state, const Vec& g, const TrainConfig& cfg) {
  if (g.size() != state.w.size())
    throw std::invalid_argument("adam_step: gradient length mismatch");
  state.step += 1;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.adam_m[i] = b1 * state.adam_m[i] + (1.0 - b1) * g[i];
    state.adam_v[i] = b2 * state.adam_v[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = state.adam_m[i] / c1;
    const double vhat = state.adam_v[i] / c2;
    state.w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
  return state;
}

std::pair<TrainState, RBFSchedule> train_schedule(const ProblemInstance& inst,
                                                  const TrainConfig& cfg,
                                                  const RngStream& rng) {
  cfg.validate();
  const Vec centers = make_centers(cfg.rbf_count, cfg.rbf_spacing, cfg.rbf_offset);
  TrainState state = TrainState::init(cfg.rbf_count, 1.0);
  RBFSchedule sched(state.w, centers, cfg.rbf_beta);

  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    RngStream r = rng.substream(iter);
    const MiniBatch batch = make_minibatch(inst, cfg.batch_size, r);
    LossAndGrad lg;
    try {
      lg = loss_and_grad(inst, batch, sched, cfg);
    } catch (const DivergenceError& e) {
      throw std::runtime_error("train_schedule: divergence in iteration " +
                               std::to_string(iter) + " (" + e.what() + ")");
    }
    if (!std::isfinite(lg.loss))
      throw std::runtime_error("train_schedule: non-finite loss in iteration " +
                               std::to_string(iter));
    state.loss_history.push_back(lg.loss);
    state = adam_step(std::move(state), lg.grad, cfg);
    sched = sched.with_weights(state.w);
  }
  return {std::move(state), std::move(sched)};
}

double exact_control(double t) { return -std::sinh(1.0 - t) / std::cosh(1.0); }

TrainConfig control_demo_defaults() {
  TrainConfig cfg;
  cfg.target_time = 1.0;
  cfg.unfold_bins = 200;
  cfg.batch_size = 1;
  cfg.iterations = 200;
  cfg.learning_rate = 0.1;
  cfg.rbf_spacing = 0.05;
  cfg.rbf_offset = 0.55;  // first bump at -0.5
  cfg.rbf_beta = 20.0;
  cfg.rbf_count = 50;
  return cfg;
}

ControlDemoResult control_demo(const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t bins = cfg.unfold_bins;
  const double eta = cfg.eta();
  const Vec centers = make_centers(cfg.rbf_count, cfg.rbf_spacing, cfg.rbf_offset);
  TrainState state = TrainState::init(cfg.rbf_count, 1.0);
  RBFSchedule sched(state.w, centers, cfg.rbf_beta);

  // Same unfold skeleton as the recovery trainer, with the scalar dynamics
  // x' = u and running cost x^2 + u^2 integrated by the rectangle rule.
  Vec x(bins + 1);
  Vec adjoint(bins + 1);
  Vec gu(bins);
  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    const ControlGrid grid = sample_schedule(sched, bins, eta, false);
    double loss = 0.0;
    x[0] = 1.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double u = grid.values[k];
      loss += eta * (x[k] * x[k] + u * u);
      x[k + 1] = x[k] + eta * u;
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("control_demo: non-finite loss in iteration " +
                               std::to_string(iter));
    state.loss_history.push_back(loss);

    adjoint[bins] = 0.0;
    for (std::size_t k = bins; k-- > 0;) {
      const double u = grid.values[k];
      gu[k] = eta * (2.0 * u + adjoint[k + 1]);
      adjoint[k] = adjoint[k + 1] + eta * 2.0 * x[k];
    }
    Vec grad(cfg.rbf_count, 0.0);
    for (std::size_t k = 0; k < bins; ++k)
      kernels::active().axpy(gu[k], grid.basis.row(k), grad.data(), cfg.rbf_count);

    state = adam_step(std::move(state), grad, cfg);
    sched = sched.with_weights(state.w);
  }

  ControlDemoResult result;
  result.times.resize(bins + 1);
  result.u_trained.resize(bins + 1);
  result.u_exact.resize(bins + 1);
  result.loss_history = state.loss_history;
  for (std::size_t k = 0; k <= bins; ++k) {
    const double t = eta * static_cast<double>(k);
    result.times[k] = t;
    result.u_trained[k] = sched.eval(t);
    result.u_exact[k] = exact_control(t);
    result.max_abs_error =
        std::max(result.max_abs_error, std::fabs(result.u_trained[k] - result.u_exact[k]));
  }
  return result;
}

}  // namespace lassoflow

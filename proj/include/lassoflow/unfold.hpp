#ifndef LASSOFLOW_UNFOLD_HPP
#define LASSOFLOW_UNFOLD_HPP

#include <utility>

#include "lassoflow/flow.hpp"
#include "lassoflow/schedule.hpp"

namespace lassoflow {

/// Settings for training an RBF-weighted control curve through the unfolded
/// Euler recursion. target_time/unfold_bins fix the grid, the rbf_* fields
/// the center layout (c_i = rbf_spacing * i - rbf_offset), and the adam_*
/// fields the optimizer. seed records provenance only; sample streams come
/// from the rng argument of train_schedule.
struct TrainConfig {
  double target_time = 3.0;
  std::size_t unfold_bins = 5000;
  std::size_t batch_size = 10;
  std::size_t iterations = 100;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double alpha = 50.0;
  double rbf_spacing = 0.25;
  double rbf_offset = 0.5;
  double rbf_beta = 20.0;
  std::size_t rbf_count = 20;
  std::uint64_t seed = 0;

  void validate() const;
  double eta() const { return target_time / static_cast<double>(unfold_bins); }
};

/// Trainable weights plus Adam accumulators and the per-iteration loss trace.
struct TrainState {
  Vec w;
  Vec adam_m;
  Vec adam_v;
  std::size_t step = 0;
  Vec loss_history;

  static TrainState init(std::size_t size, double weight_value = 1.0);
};

/// K ground-truth/observation pairs sharing one sensing matrix.
struct MiniBatch {
  std::vector<Observation> pairs;
};

MiniBatch make_minibatch(const ProblemInstance& inst, std::size_t k, RngStream& rng);

/// Mean terminal squared error (1/K) sum_i ||x_i^(N) - s_i||^2 after running
/// the Euler recursion from x = 0 for each pair, with regularization
/// max(0, sched(eta k)) at every step.
double unfold_loss(const ProblemInstance& inst, const MiniBatch& batch,
                   const RBFSchedule& sched, const TrainConfig& cfg);

/// Exact gradient of unfold_loss with respect to the RBF weights, computed by
/// the reverse adjoint recursion over the checkpointed forward states:
///   a^(N) = (2/K)(x^(N) - s)
///   a^(k) = (I - eta (a^T a + lambda_k D_k)) a^(k+1),  D_k = diag(alpha / cosh^2(alpha x^(k)))
///   dL/dlambda_k = -eta tanh(alpha x^(k)) . a^(k+1)
///   dL/dw_i = sum_k basis_i(eta k) dL/dlambda_k   (zero where the clamp is active)
Vec unfold_grad(const ProblemInstance& inst, const MiniBatch& batch,
                const RBFSchedule& sched, const TrainConfig& cfg);

/// One bias-corrected Adam update; g = 0 leaves the weights untouched.
TrainState adam_step(TrainState state, const Vec& g, const TrainConfig& cfg);

/// Runs cfg.iterations Adam steps, each on a fresh mini-batch drawn from
/// rng.substream(iteration). Weights start at all ones. Returns the final
/// state and the trained regularization curve.
std::pair<TrainState, RBFSchedule> train_schedule(const ProblemInstance& inst,
                                                  const TrainConfig& cfg,
                                                  const RngStream& rng);

/// Scalar optimal-control example solved with the same unfold/adjoint/Adam
/// machinery: minimize integral of x^2 + u^2 over [0, 1] subject to x' = u,
/// x(0) = 1, free endpoint. The closed-form optimum is
/// u*(t) = -sinh(1 - t) / cosh(1).
struct ControlDemoResult {
  Vec times;
  Vec u_trained;
  Vec u_exact;
  double max_abs_error = 0.0;
  Vec loss_history;
};

double exact_control(double t);
ControlDemoResult control_demo(const TrainConfig& cfg);

/// Defaults reproducing the reference run of the control example
/// (N = 200, T = 1, I = 200, lr = 0.1, 50 bumps 0.05 apart).
TrainConfig control_demo_defaults();

}  // namespace lassoflow

#endif

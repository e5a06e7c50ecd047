#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lassoflow/unfold.hpp"

using namespace lassoflow;

namespace {

ProblemInstance small_instance(std::uint64_t seed, std::size_t m, std::size_t n,
                               double sigma = 0.1, double p = 0.25) {
  RngStream rng(seed, 0);
  return ProblemInstance::generate(rng, m, n, sigma, p);
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.target_time = 0.5;
  cfg.unfold_bins = 50;
  cfg.batch_size = 2;
  cfg.iterations = 10;
  cfg.learning_rate = 1e-2;
  cfg.alpha = 25.0;
  cfg.rbf_spacing = 0.12;
  cfg.rbf_offset = 0.1;
  cfg.rbf_beta = 20.0;
  cfg.rbf_count = 5;
  return cfg;
}

RBFSchedule config_schedule(const TrainConfig& cfg, double weight = 1.0) {
  return RBFSchedule(Vec(cfg.rbf_count, weight),
                     make_centers(cfg.rbf_count, cfg.rbf_spacing, cfg.rbf_offset),
                     cfg.rbf_beta);
}

}  // namespace

TEST_CASE("zero data keeps the unfolded flow at the origin") {
  const ProblemInstance inst = small_instance(31, 4, 8, 0.0, 0.0);
  TrainConfig cfg = small_config();
  cfg.batch_size = 1;
  RngStream rng(31, 10);
  const MiniBatch batch = make_minibatch(inst, 1, rng);
  const RBFSchedule sched = config_schedule(cfg);
  CHECK(unfold_loss(inst, batch, sched, cfg) == 0.0);
  const Vec g = unfold_grad(inst, batch, sched, cfg);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("single-pair loss equals the squared error of one euler solve") {
  const ProblemInstance inst = small_instance(32, 4, 8);
  TrainConfig cfg = small_config();
  cfg.batch_size = 1;
  RngStream rng(32, 10);
  const MiniBatch batch = make_minibatch(inst, 1, rng);
  const RBFSchedule sched = config_schedule(cfg);

  const double loss = unfold_loss(inst, batch, sched, cfg);
  const Trajectory traj = euler_solve(
      inst, batch.pairs[0].y, Schedule::rbf(sched), cfg.alpha,
      SolverConfig(cfg.target_time, cfg.unfold_bins, cfg.unfold_bins), Vec(8, 0.0));
  CHECK(loss == squared_error(traj.terminal, batch.pairs[0].s));
}

TEST_CASE("adjoint gradient matches central finite differences") {
  const ProblemInstance inst = small_instance(33, 4, 8);
  const TrainConfig cfg = small_config();
  RngStream rng(33, 10);
  const MiniBatch batch = make_minibatch(inst, cfg.batch_size, rng);
  const RBFSchedule sched = config_schedule(cfg);

  const Vec g = unfold_grad(inst, batch, sched, cfg);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < sched.size(); ++i) {
    Vec wp = sched.weights();
    Vec wm = sched.weights();
    wp[i] += h;
    wm[i] -= h;
    const double fp = unfold_loss(inst, batch, sched.with_weights(wp), cfg);
    const double fm = unfold_loss(inst, batch, sched.with_weights(wm), cfg);
    const double fd = (fp - fm) / (2.0 * h);
    const double rel = std::fabs(g[i] - fd) / std::max({std::fabs(fd), std::fabs(g[i]), 1e-6});
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel <= 1e-5);
}

TEST_CASE("gradient averages over batch elements") {
  const ProblemInstance inst = small_instance(34, 4, 8);
  TrainConfig cfg = small_config();
  cfg.batch_size = 2;
  RngStream rng(34, 10);
  const MiniBatch batch = make_minibatch(inst, 2, rng);
  const RBFSchedule sched = config_schedule(cfg);

  const Vec joint = unfold_grad(inst, batch, sched, cfg);

  TrainConfig single = cfg;
  single.batch_size = 1;
  MiniBatch first;
  first.pairs = {batch.pairs[0]};
  MiniBatch second;
  second.pairs = {batch.pairs[1]};
  const Vec g1 = unfold_grad(inst, first, sched, single);
  const Vec g2 = unfold_grad(inst, second, sched, single);
  for (std::size_t i = 0; i < joint.size(); ++i)
    CHECK(std::fabs(joint[i] - 0.5 * (g1[i] + g2[i])) <=
          1e-12 * (1.0 + std::fabs(joint[i])));
}

TEST_CASE("clamped schedule regions contribute no gradient") {
  const ProblemInstance inst = small_instance(35, 4, 8);
  TrainConfig cfg = small_config();
  RngStream rng(35, 10);
  const MiniBatch batch = make_minibatch(inst, cfg.batch_size, rng);
  // strongly negative weights force lambda(t) <= 0 everywhere
  const RBFSchedule sched = config_schedule(cfg, -3.0);
  const Vec g = unfold_grad(inst, batch, sched, cfg);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("adam fixed point and first step size") {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.01;

  TrainState st = TrainState::init(3, 1.0);
  const TrainState same = adam_step(st, Vec(3, 0.0), cfg);
  for (double v : same.w) CHECK(v == 1.0);
  CHECK(same.step == 1);

  const TrainState moved = adam_step(st, Vec(3, 1.0), cfg);
  for (double v : moved.w)
    CHECK(v == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
}

TEST_CASE("adam walks a quadratic downhill") {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.05;
  const double target = 0.3;
  TrainState st = TrainState::init(1, 2.0);
  double prev = std::fabs(st.w[0] - target);
  for (int i = 0; i < 40; ++i) {
    const Vec g{st.w[0] - target};
    st = adam_step(std::move(st), g, cfg);
    const double cur = std::fabs(st.w[0] - target);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("adam rejects mismatched gradients") {
  TrainConfig cfg = small_config();
  TrainState st = TrainState::init(3, 1.0);
  CHECK_THROWS_AS(adam_step(st, Vec(2, 0.0), cfg), std::invalid_argument);
}

TEST_CASE("zero iterations return the initial weights") {
  const ProblemInstance inst = small_instance(36, 4, 8);
  TrainConfig cfg = small_config();
  cfg.iterations = 0;
  const auto [state, sched] = train_schedule(inst, cfg, RngStream(36, 100));
  for (double v : state.w) CHECK(v == 1.0);
  CHECK(state.step == 0);
  CHECK(state.loss_history.empty());
}

TEST_CASE("training is deterministic and reduces the loss") {
  const ProblemInstance inst = small_instance(37, 16, 32, 0.1, 0.15);
  TrainConfig cfg;
  cfg.target_time = 1.0;
  cfg.unfold_bins = 500;
  cfg.batch_size = 4;
  cfg.iterations = 30;
  cfg.learning_rate = 2e-2;
  cfg.alpha = 50.0;
  cfg.rbf_spacing = 0.25;
  cfg.rbf_offset = 0.5;
  cfg.rbf_beta = 20.0;
  cfg.rbf_count = 7;

  const auto [state1, sched1] = train_schedule(inst, cfg, RngStream(37, 100));
  const auto [state2, sched2] = train_schedule(inst, cfg, RngStream(37, 100));
  REQUIRE(state1.w.size() == state2.w.size());
  for (std::size_t i = 0; i < state1.w.size(); ++i)
    CHECK(state1.w[i] == state2.w[i]);
  REQUIRE(state1.loss_history.size() == 30);

  // paired evaluation on shared trial streams: the trained curve must beat
  // the all-ones initialization it started from
  const RBFSchedule init(Vec(cfg.rbf_count, 1.0), sched1.centers(), cfg.rbf_beta);
  const SolverConfig eval_cfg(cfg.target_time, cfg.unfold_bins, cfg.unfold_bins);
  const RngStream eval_base(37, 999999);
  const double mse_init =
      estimate_mse_curve(inst, Schedule::rbf(init), cfg.alpha, eval_cfg, 200, eval_base)
          .mse.back();
  const double mse_trained =
      estimate_mse_curve(inst, Schedule::rbf(sched1), cfg.alpha, eval_cfg, 200, eval_base)
          .mse.back();
  CHECK(mse_trained < mse_init);
}

TEST_CASE("control demo reproduces the closed-form optimum") {
  CHECK(exact_control(1.0) == doctest::Approx(0.0));
  CHECK(exact_control(0.0) == doctest::Approx(-std::tanh(1.0)).epsilon(1e-12));
  CHECK(exact_control(0.0) == doctest::Approx(-0.76159).epsilon(1e-4));

  const ControlDemoResult result = control_demo(control_demo_defaults());
  CHECK(result.times.size() == 201);
  CHECK(result.max_abs_error <= 0.05);
  CHECK(result.loss_history.front() > result.loss_history.back());
  // optimal cost for this problem is tanh(1)
  CHECK(result.loss_history.back() == doctest::Approx(std::tanh(1.0)).epsilon(0.02));
}

TEST_CASE("train config validation") {
  TrainConfig cfg = small_config();
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.unfold_bins = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

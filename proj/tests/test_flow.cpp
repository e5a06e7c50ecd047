#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lassoflow/flow.hpp"
#include "lassoflow/io.hpp"

using namespace lassoflow;

namespace {

ProblemInstance scalar_instance() {
  Mat a(1, 1);
  a(0, 0) = 1.0;
  return ProblemInstance(std::move(a), 0.0, 1.0);
}

ProblemInstance paper_instance() {
  RngStream rng(1, 0);
  return ProblemInstance::generate(rng, 64, 128, 0.1, 0.1);
}

}  // namespace

TEST_CASE("solver config derives eta and validates the stride") {
  const SolverConfig cfg(0.5, 500);
  CHECK(cfg.eta() == 0.5 / 500.0);
  CHECK(cfg.record_stride == 1);

  const SolverConfig big(4.0, 5000);
  CHECK(big.record_stride == 10);

  CHECK_THROWS_AS(SolverConfig(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SolverConfig(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(SolverConfig(1.0, 10, 3), std::invalid_argument);
}

TEST_CASE("a stationary start stays put exactly") {
  const ProblemInstance inst = scalar_instance();
  const Vec y{2.0};
  const SolverConfig cfg(1.0, 100);
  const Trajectory traj =
      euler_solve_const(inst, y, 1.0, 50.0, cfg, Vec{1.0});
  for (const Vec& state : traj.states) CHECK(state[0] == 1.0);
  CHECK(traj.terminal[0] == 1.0);
}

TEST_CASE("pure least-squares flow decays geometrically") {
  const ProblemInstance inst = scalar_instance();
  const Vec y{0.0};
  const SolverConfig cfg(5.0, 50);
  const double eta = cfg.eta();
  const Trajectory traj =
      euler_solve(inst, y, Schedule::constant(0.0), 50.0, cfg, Vec{1.0});
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double expected = std::pow(1.0 - eta, static_cast<double>(k));
    CHECK(traj.states[k][0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("terminal state is sparse at the reference settings") {
  const ProblemInstance inst = paper_instance();
  RngStream rng(1, 42);
  const Vec s = sample_signal(rng, 128, 0.1);
  const Observation obs = observe(inst, s, rng);
  const SolverConfig cfg(0.5, 500);
  const Trajectory traj =
      euler_solve_const(inst, obs.y, 5.0, 50.0, cfg, Vec(128, 0.0));

  CHECK(traj.times.size() == 501);
  CHECK_FALSE(traj.stability_warning);

  std::size_t near_zero = 0;
  std::size_t deviating = 0;
  for (double v : traj.terminal) {
    if (std::fabs(v) <= 0.05) ++near_zero;
    if (std::fabs(v) > 0.1) ++deviating;
  }
  CHECK(near_zero >= 96);  // 75% of 128
  CHECK(deviating >= 1);
}

TEST_CASE("divergence raises an error naming the step") {
  const ProblemInstance inst = scalar_instance();
  const Vec y{0.0};
  const SolverConfig cfg(2e200, 2);  // |1 - eta| blows past the double range
  try {
    euler_solve_const(inst, y, 0.0, 50.0, cfg, Vec{1.0});
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step == 1);  // the squared norm leaves the double range right away
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("stability margin bound") {
  const ProblemInstance inst = scalar_instance();
  CHECK(stability_margin(inst, 0.0, 50.0, 1.0) == doctest::Approx(1.0));
  CHECK(stability_margin(inst, 0.0, 50.0, 3.0) == doctest::Approx(-1.0));

  const ProblemInstance paper = paper_instance();
  CHECK(stability_margin(paper, 5.0, 50.0, 4.0 / 5000.0) > 0.0);

  // an over-large step is flagged on the trajectory
  const SolverConfig cfg(3.0, 1);
  const Trajectory traj =
      euler_solve_const(inst, Vec{0.1}, 0.0, 50.0, cfg, Vec{0.1});
  CHECK(traj.stability_warning);
}

TEST_CASE("constant schedule equals the dedicated constant path bit for bit") {
  const ProblemInstance inst = paper_instance();
  RngStream rng(1, 7);
  const Vec s = sample_signal(rng, 128, 0.1);
  const Observation obs = observe(inst, s, rng);
  const SolverConfig cfg(0.5, 250);
  const Trajectory a =
      euler_solve(inst, obs.y, Schedule::constant(3.0), 50.0, cfg, Vec(128, 0.0));
  const Trajectory b = euler_solve_const(inst, obs.y, 3.0, 50.0, cfg, Vec(128, 0.0));
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    for (std::size_t i = 0; i < 128; ++i) CHECK(a.states[k][i] == b.states[k][i]);
}

TEST_CASE("energy decreases along a stable constant-lambda run") {
  RngStream rng(11, 0);
  const ProblemInstance inst = ProblemInstance::generate(rng, 16, 32, 0.1, 0.2);
  RngStream draw(11, 1);
  const Vec s = sample_signal(draw, 32, 0.2);
  const Observation obs = observe(inst, s, draw);
  const SmoothLassoParams params(2.0, 50.0);
  const SolverConfig cfg(1.0, 2000, 1);
  REQUIRE(stability_margin(inst, 2.0, 50.0, cfg.eta()) > 0.0);
  const Trajectory traj =
      euler_solve_const(inst, obs.y, 2.0, 50.0, cfg, Vec(32, 0.0));
  double prev = smooth_energy(traj.states.front(), inst, obs.y, params);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double cur = smooth_energy(traj.states[k], inst, obs.y, params);
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
}

TEST_CASE("halving the step size halves the terminal gap") {
  RngStream rng(12, 0);
  const ProblemInstance inst = ProblemInstance::generate(rng, 12, 24, 0.1, 0.2);
  RngStream draw(12, 1);
  const Vec s = sample_signal(draw, 24, 0.2);
  const Observation obs = observe(inst, s, draw);
  const Vec x0(24, 0.0);

  auto terminal = [&](std::size_t bins) {
    return euler_solve_const(inst, obs.y, 2.0, 50.0, SolverConfig(1.0, bins, bins), x0)
        .terminal;
  };
  const Vec tN = terminal(400);
  const Vec t2N = terminal(800);
  const Vec t4N = terminal(1600);
  const double d1 = std::sqrt(squared_distance(tN, t2N));
  const double d2 = std::sqrt(squared_distance(t2N, t4N));
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("mse curve of the zero problem is identically zero") {
  RngStream rng(13, 0);
  const ProblemInstance inst = ProblemInstance::generate(rng, 8, 16, 0.0, 0.0);
  const MseCurve curve = estimate_mse_curve(inst, Schedule::constant(1.0), 50.0,
                                            SolverConfig(1.0, 100), 3, RngStream(13, 100));
  for (double v : curve.mse) CHECK(v == 0.0);
}

TEST_CASE("single-trial mse curve equals the squared error along one solve") {
  RngStream rng(14, 0);
  const ProblemInstance inst = ProblemInstance::generate(rng, 8, 16, 0.1, 0.3);
  const SolverConfig cfg(1.0, 200);
  const RngStream base(14, 500);
  const MseCurve curve =
      estimate_mse_curve(inst, Schedule::constant(2.0), 50.0, cfg, 1, base);

  RngStream r = base.substream(1);
  const Vec s = sample_signal(r, 16, 0.3);
  const Observation obs = observe(inst, s, r);
  const Trajectory traj = euler_solve_const(inst, obs.y, 2.0, 50.0, cfg, Vec(16, 0.0));
  REQUIRE(curve.times.size() == traj.times.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    CHECK(curve.mse[k] == squared_error(traj.states[k], s));
}

TEST_CASE("mse estimates are stable under grid refinement") {
  RngStream rng(15, 0);
  const ProblemInstance inst = ProblemInstance::generate(rng, 16, 32, 0.1, 0.1);
  const RngStream base(15, 1000);
  auto terminal_mse = [&](std::size_t bins) {
    return estimate_mse_curve(inst, Schedule::constant(5.0), 50.0,
                              SolverConfig(4.0, bins, bins), 50, base)
        .mse.back();
  };
  const double coarse = terminal_mse(5000);
  const double fine = terminal_mse(10000);
  CHECK(std::fabs(coarse - fine) / std::max(coarse, fine) <= 0.02);
}

TEST_CASE("trajectory csv format") {
  Trajectory traj;
  traj.times = {0.0, 0.5};
  traj.states = {Vec{0.0, 1.0}, Vec{0.25, -1.5}};
  traj.terminal = traj.states.back();
  const std::string path = "test_traj.csv";
  io::write_trajectory_csv(traj, path);
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  in.close();
  std::remove(path.c_str());
  CHECK(content.str() == "t,x_1,x_2\n0,0,1\n0.5,0.25,-1.5\n");
}

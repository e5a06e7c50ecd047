// Command-line front end: seeded experiment runs emitting CSV artifacts.
//
// Streams are carved out of the run seed so commands never share draws:
// the sensing matrix always comes from stream 0, per-trial data from
// kTrialBase + i, training batches from kTrainBase + i, and post-training
// evaluation from kEvalBase + i.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lassoflow/analysis.hpp"
#include "lassoflow/io.hpp"
#include "lassoflow/unfold.hpp"

namespace fs = std::filesystem;
using namespace lassoflow;

namespace {

constexpr std::uint64_t kMatrixStream = 0;
constexpr std::uint64_t kSignalStream = 1ull << 24;
constexpr std::uint64_t kTrialBase = 1ull << 32;
constexpr std::uint64_t kTrainBase = 2ull << 32;
constexpr std::uint64_t kEvalBase = 3ull << 32;

struct CommonOpts {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::size_t n = 128;
  std::size_t m = 64;
  double p = 0.1;
  double sigma = 0.1;
  double alpha = 50.0;
  std::string config;
};

// Config files are flat key=value lines; their tokens are spliced in right
// after the subcommand name (see splice_config_args), so explicit flags win
// through the take-last policy.
void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--seed", o.seed, "Run seed; fixes every random draw");
  cmd->add_option("--out-dir", o.out_dir, "Directory the CSV artifacts go to");
  cmd->add_option("--n", o.n, "Signal length");
  cmd->add_option("--m", o.m, "Observation length");
  cmd->add_option("--p", o.p, "Nonzero probability of the signal");
  cmd->add_option("--sigma", o.sigma, "Observation noise level");
  cmd->add_option("--alpha", o.alpha, "Sharpness of the smooth |x| surrogate");
  cmd->add_option("--config", o.config, "Flat key=value config file")
      ->configurable(false);
}

std::vector<std::string> load_config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("malformed config line: " + line);
    const std::string key = line.substr(0, eq);
    if (key == "config") continue;  // no recursive config files
    tokens.push_back("--" + line);
  }
  return tokens;
}

// Returns the command line (without the program name) with any config-file
// tokens inserted directly after the subcommand. Keys that also appear as
// explicit flags are dropped from the file, so flags always win.
std::vector<std::string> splice_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t subcommand_pos = args.size();
  std::string config_path;
  std::vector<std::string> explicit_keys;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (subcommand_pos == args.size() && !args[i].empty() && args[i][0] != '-') {
      subcommand_pos = i;
      continue;
    }
    if (args[i].rfind("--", 0) == 0)
      explicit_keys.push_back(args[i].substr(2, args[i].find('=') - 2));
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty() || subcommand_pos == args.size()) return args;
  std::vector<std::string> tokens = load_config_tokens(config_path);
  std::erase_if(tokens, [&](const std::string& tok) {
    const std::string key = tok.substr(2, tok.find('=') - 2);
    return std::find(explicit_keys.begin(), explicit_keys.end(), key) !=
           explicit_keys.end();
  });
  args.insert(args.begin() + subcommand_pos + 1, tokens.begin(), tokens.end());
  return args;
}

ProblemInstance make_instance(const CommonOpts& o) {
  if (!(o.alpha > 0.0)) throw CLI::ValidationError("--alpha must be positive");
  if (!(o.p >= 0.0 && o.p <= 1.0)) throw CLI::ValidationError("--p must lie in [0, 1]");
  if (!(o.sigma >= 0.0)) throw CLI::ValidationError("--sigma must be nonnegative");
  if (o.n == 0 || o.m == 0) throw CLI::ValidationError("--n and --m must be positive");
  RngStream rng(o.seed, kMatrixStream);
  return ProblemInstance::generate(rng, o.m, o.n, o.sigma, o.p);
}

std::string path_in(const CommonOpts& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

// The resolved configuration is written next to the outputs before any
// compute starts; it doubles as a fast write-permission probe.
void write_resolved_config(const CLI::App& cmd, const CommonOpts& o) {
  const std::string path = path_in(o, cmd.get_name() + "_config.txt");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << cmd.config_to_str(true, false);
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string num_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_positive(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw CLI::ValidationError(std::string(what) + " must not be empty");
  for (double x : xs)
    if (!(x > 0.0)) throw CLI::ValidationError(std::string(what) + " must be positive");
}

// ---- recover ------------------------------------------------------------

struct RecoverOpts {
  CommonOpts common;
  double lambda = 5.0;
  std::string schedule_file;
  double horizon = 0.5;
  std::size_t bins = 500;
  std::size_t stride = 0;
};

int run_recover(const CLI::App& cmd, const RecoverOpts& o) {
  if (o.schedule_file.empty() && !(o.lambda > 0.0))
    throw CLI::ValidationError("--lambda must be positive");
  const SolverConfig cfg(o.horizon, o.bins, o.stride);
  const ProblemInstance inst = make_instance(o.common);
  write_resolved_config(cmd, o.common);

  const Schedule schedule = o.schedule_file.empty()
                                ? Schedule::constant(o.lambda)
                                : Schedule::rbf(load_schedule(o.schedule_file));

  RngStream draw(o.common.seed, kSignalStream);
  const Vec s = sample_signal(draw, inst.n(), inst.p());
  const Observation obs = observe(inst, s, draw);
  const Trajectory traj =
      euler_solve(inst, obs.y, schedule, o.common.alpha, cfg, Vec(inst.n(), 0.0));

  io::write_trajectory_csv(traj, path_in(o.common, "trajectory.csv"));
  std::cerr << "terminal squared error: "
            << io::format_double(squared_error(traj.terminal, s)) << "\n";
  if (traj.stability_warning)
    std::cerr << "warning: step size exceeds the stability bound (margin "
              << io::format_double(traj.stability_margin) << ")\n";
  return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepOpts {
  CommonOpts common;
  std::vector<double> lambdas{0.5, 1.5, 3.0};
  std::vector<std::size_t> bins_list;
  double lambda_for_bins = 5.0;
  double horizon = 4.0;
  std::size_t bins = 5000;
  std::size_t trials = 100;
  bool metrics = false;
};

int run_sweep(const CLI::App& cmd, const SweepOpts& o) {
  require_positive(o.lambdas, "--lambda-list");
  if (!(o.lambda_for_bins > 0.0)) throw CLI::ValidationError("--lambda must be positive");
  if (o.trials == 0) throw CLI::ValidationError("--trials must be positive");
  const SolverConfig curve_cfg(o.horizon, o.bins);
  std::vector<SolverConfig> bin_cfgs;
  for (std::size_t b : o.bins_list) bin_cfgs.emplace_back(o.horizon, b, b);

  const ProblemInstance inst = make_instance(o.common);
  write_resolved_config(cmd, o.common);
  const RngStream base(o.common.seed, kTrialBase);

  std::printf("lambda,mse_at_T\n");
  for (double lambda : o.lambdas) {
    const MseCurve curve = estimate_mse_curve(inst, Schedule::constant(lambda),
                                              o.common.alpha, curve_cfg, o.trials, base);
    io::write_mse_csv(curve, path_in(o.common, "mse_lambda_" + num_tag(lambda) + ".csv"));
    std::printf("%s,%s\n", num_tag(lambda).c_str(),
                io::format_double(curve.mse.back()).c_str());
  }

  if (!o.bins_list.empty()) {
    std::vector<double> ns;
    std::vector<double> terminals;
    std::printf("bins,mse_at_T\n");
    for (std::size_t i = 0; i < bin_cfgs.size(); ++i) {
      const MseCurve curve =
          estimate_mse_curve(inst, Schedule::constant(o.lambda_for_bins),
                             o.common.alpha, bin_cfgs[i], o.trials, base);
      ns.push_back(static_cast<double>(o.bins_list[i]));
      terminals.push_back(curve.mse.back());
      std::printf("%zu,%s\n", o.bins_list[i],
                  io::format_double(curve.mse.back()).c_str());
    }
    io::write_pairs_csv("bins,mse", ns, terminals, path_in(o.common, "n_sweep.csv"));
  }

  if (o.metrics) {
    const auto rows = lambda_sweep(inst, o.lambdas, o.common.alpha,
                                   SolverConfig(o.horizon, o.bins, o.bins),
                                   o.trials, base);
    io::write_sweep_csv(rows, path_in(o.common, "lambda_metrics.csv"));
  }
  return 0;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeOpts {
  CommonOpts common;
  std::vector<double> lambdas{1.5, 5.0};
  double horizon = 4.0;
  std::size_t bins = 5000;
  double rho_horizon = 2.0;
  std::size_t rho_bins = 2000;
  double perturb = 0.1;
};

int run_analyze(const CLI::App& cmd, const AnalyzeOpts& o) {
  require_positive(o.lambdas, "--lambda-list");
  if (!(o.perturb > 0.0)) throw CLI::ValidationError("--perturb must be positive");
  const SolverConfig eq_cfg(o.horizon, o.bins, o.bins);
  const SolverConfig rho_cfg(o.rho_horizon, o.rho_bins);

  const ProblemInstance inst = make_instance(o.common);
  write_resolved_config(cmd, o.common);

  RngStream draw(o.common.seed, kSignalStream);
  const Vec s = sample_signal(draw, inst.n(), inst.p());
  const Observation obs = observe(inst, s, draw);

  for (double lambda : o.lambdas) {
    const SmoothLassoParams params(lambda, o.common.alpha);
    const Equilibrium eq =
        find_equilibrium(inst, obs.y, params, o.horizon, o.bins);
    const LinearizationReport report = linearize(inst, params, eq.xstar);
    const double omega1 = report.omega1();

    const Trajectory zero_start = euler_solve_const(
        inst, obs.y, lambda, o.common.alpha, rho_cfg, Vec(inst.n(), 0.0));
    const RatioCurve zero_curve = error_ratio_curve(zero_start, eq.xstar, omega1);
    io::write_ratio_csv(zero_curve,
                        path_in(o.common, "rho_zero_" + num_tag(lambda) + ".csv"));

    RngStream perturb_rng(o.common.seed, kSignalStream + 1);
    Vec x0 = eq.xstar;
    for (double& v : x0) v += o.perturb * perturb_rng.normal();
    const Trajectory near_start =
        euler_solve_const(inst, obs.y, lambda, o.common.alpha, rho_cfg, x0);
    const RatioCurve near_curve = error_ratio_curve(near_start, eq.xstar, omega1);
    io::write_ratio_csv(near_curve,
                        path_in(o.common, "rho_perturbed_" + num_tag(lambda) + ".csv"));

    const double slope_near = fit_log_slope(near_curve.times, near_curve.rho, 0.0,
                                            std::min(1.0, o.rho_horizon));
    const double slope_zero = fit_log_slope(zero_curve.times, zero_curve.rho,
                                            0.5 * o.rho_horizon, o.rho_horizon);
    std::printf("lambda=%s omega1=%s lower_bound=%s residual=%s "
                "slope_perturbed=%s slope_zero_late=%s\n",
                num_tag(lambda).c_str(), io::format_double(omega1).c_str(),
                io::format_double(report.omega1_lower_bound).c_str(),
                io::format_double(eq.residual).c_str(),
                io::format_double(slope_near).c_str(),
                io::format_double(slope_zero).c_str());
  }
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  TrainConfig cfg;
  std::size_t eval_trials = 100;
};

int run_train(const CLI::App& cmd, const TrainOpts& o) {
  TrainConfig cfg = o.cfg;
  cfg.alpha = o.common.alpha;
  cfg.seed = o.common.seed;
  cfg.validate();
  if (o.eval_trials == 0) throw CLI::ValidationError("--eval-trials must be positive");

  const ProblemInstance inst = make_instance(o.common);
  write_resolved_config(cmd, o.common);

  const auto [state, sched] =
      train_schedule(inst, cfg, RngStream(o.common.seed, kTrainBase));

  io::write_loss_csv(state.loss_history, path_in(o.common, "train_loss.csv"));
  save_schedule(sched, path_in(o.common, "schedule.txt"));
  io::write_schedule_curve_csv(Schedule::rbf(sched), cfg.target_time, 0.05,
                               path_in(o.common, "schedule_curve.csv"));

  const MseCurve curve = estimate_mse_curve(
      inst, Schedule::rbf(sched), cfg.alpha,
      SolverConfig(cfg.target_time, cfg.unfold_bins), o.eval_trials,
      RngStream(o.common.seed, kEvalBase));
  io::write_mse_csv(curve, path_in(o.common, "mse_trained.csv"));

  std::printf("final_loss=%s mse_at_target=%s\n",
              state.loss_history.empty()
                  ? "nan"
                  : io::format_double(state.loss_history.back()).c_str(),
              io::format_double(curve.mse.back()).c_str());
  return 0;
}

// ---- control-demo ------------------------------------------------------------

struct ControlOpts {
  CommonOpts common;
  TrainConfig cfg = control_demo_defaults();
};

int run_control_demo(const CLI::App& cmd, const ControlOpts& o) {
  o.cfg.validate();
  // no instance needed; still honor --out-dir and provenance
  write_resolved_config(cmd, o.common);
  const ControlDemoResult result = control_demo(o.cfg);
  io::write_control_csv(result, path_in(o.common, "control_curve.csv"));
  io::write_loss_csv(result.loss_history, path_in(o.common, "control_loss.csv"));
  std::printf("max_abs_error=%s\n", io::format_double(result.max_abs_error).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery by gradient-flow integration, local convergence "
               "analysis, and trainable regularization schedules"};
  app.require_subcommand(1);

  RecoverOpts recover;
  CLI::App* recover_cmd =
      app.add_subcommand("recover", "Integrate one recovery trajectory and dump it");
  add_common(recover_cmd, recover.common);
  recover_cmd->add_option("--lambda", recover.lambda, "Constant regularization weight");
  recover_cmd->add_option("--schedule", recover.schedule_file,
                          "Schedule file overriding --lambda");
  recover_cmd->add_option("--T", recover.horizon, "Integration horizon");
  recover_cmd->add_option("--N", recover.bins, "Euler bins");
  recover_cmd->add_option("--stride", recover.stride, "Recording stride (0 = auto)");

  SweepOpts sweep;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "MSE curves per lambda plus bin-count sweeps");
  add_common(sweep_cmd, sweep.common);
  sweep_cmd->add_option("--lambda-list", sweep.lambdas, "Lambda values")->delimiter(',');
  sweep_cmd->add_option("--N-list", sweep.bins_list, "Bin counts for the grid sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--lambda", sweep.lambda_for_bins,
                        "Lambda used by the bin-count sweep");
  sweep_cmd->add_option("--T", sweep.horizon, "Horizon");
  sweep_cmd->add_option("--N", sweep.bins, "Euler bins for the lambda curves");
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per estimate");
  sweep_cmd->add_flag("--metrics", sweep.metrics,
                      "Also write per-lambda equilibrium metrics");

  AnalyzeOpts analyze;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Equilibrium linearization and error-ratio curves");
  add_common(analyze_cmd, analyze.common);
  analyze_cmd->add_option("--lambda-list", analyze.lambdas, "Lambda values")
      ->delimiter(',');
  analyze_cmd->add_option("--T", analyze.horizon, "Equilibrium horizon");
  analyze_cmd->add_option("--N", analyze.bins, "Euler bins for the equilibrium");
  analyze_cmd->add_option("--rho-T", analyze.rho_horizon, "Ratio-curve horizon");
  analyze_cmd->add_option("--rho-N", analyze.rho_bins, "Ratio-curve bins");
  analyze_cmd->add_option("--perturb", analyze.perturb,
                          "Std dev of the near-equilibrium start");

  TrainOpts train;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Optimize the regularization schedule");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--T", train.cfg.target_time, "Target time");
  train_cmd->add_option("--N", train.cfg.unfold_bins, "Unfold depth");
  train_cmd->add_option("--batch", train.cfg.batch_size, "Mini-batch size");
  train_cmd->add_option("--iters", train.cfg.iterations, "Training iterations");
  train_cmd->add_option("--lr", train.cfg.learning_rate, "Adam learning rate");
  train_cmd->add_option("--rbf-count", train.cfg.rbf_count, "Number of bumps");
  train_cmd->add_option("--rbf-spacing", train.cfg.rbf_spacing, "Center spacing");
  train_cmd->add_option("--rbf-offset", train.cfg.rbf_offset, "Center offset");
  train_cmd->add_option("--rbf-beta", train.cfg.rbf_beta, "Bump width parameter");
  train_cmd->add_option("--eval-trials", train.eval_trials,
                        "Trials for the post-training curve");

  ControlOpts control;
  CLI::App* control_cmd = app.add_subcommand(
      "control-demo", "Optimal-control example with a known exact solution");
  add_common(control_cmd, control.common);
  control_cmd->add_option("--T", control.cfg.target_time, "Horizon");
  control_cmd->add_option("--N", control.cfg.unfold_bins, "Unfold depth");
  control_cmd->add_option("--iters", control.cfg.iterations, "Training iterations");
  control_cmd->add_option("--lr", control.cfg.learning_rate, "Adam learning rate");
  control_cmd->add_option("--rbf-count", control.cfg.rbf_count, "Number of bumps");
  control_cmd->add_option("--rbf-spacing", control.cfg.rbf_spacing, "Center spacing");
  control_cmd->add_option("--rbf-offset", control.cfg.rbf_offset, "Center offset");
  control_cmd->add_option("--rbf-beta", control.cfg.rbf_beta, "Bump width parameter");

  try {
    std::vector<std::string> args = splice_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (recover_cmd->parsed()) return run_recover(*recover_cmd, recover);
    if (sweep_cmd->parsed()) return run_sweep(*sweep_cmd, sweep);
    if (analyze_cmd->parsed()) return run_analyze(*analyze_cmd, analyze);
    if (train_cmd->parsed()) return run_train(*train_cmd, train);
    if (control_cmd->parsed()) return run_control_demo(*control_cmd, control);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#ifndef LASSOFLOW_FLOW_HPP
#define LASSOFLOW_FLOW_HPP

#include <stdexcept>
#include <string>

#include "lassoflow/objective.hpp"
#include "lassoflow/problem.hpp"
#include "lassoflow/schedule.hpp"

namespace lassoflow {

/// A state went non-finite during integration. step is 1-based; trial is -1
/// outside multi-trial runs.
struct DivergenceError : std::runtime_error {
  std::size_t step;
  long trial;
  explicit DivergenceError(std::size_t step_, long trial_ = -1);
};

/// Time grid for one Euler solve: horizon T split into N bins of width
/// eta = T/N. Recording keeps every record_stride-th state; the stride must
/// divide N so the terminal state is always recorded.
struct SolverConfig {
  double horizon;
  std::size_t bins;
  std::size_t record_stride;

  SolverConfig(double horizon_, std::size_t bins_, std::size_t record_stride_ = 0);
  double eta() const { return horizon / static_cast<double>(bins); }
};

/// Recorded states of one Euler solve. terminal duplicates the last recorded
/// state. stability_margin is the step-size slack actually observed (see
/// stability_margin below); negative means the run exceeded the linear
/// stability bound and the result is advisory only.
struct Trajectory {
  Vec times;
  std::vector<Vec> states;
  Vec terminal;
  double stability_margin = 0.0;
  bool stability_warning = false;
};

/// 2 / (||a^T a||_2 + lambda_max * alpha) - eta. Positive means the Euler
/// step eta sits inside the linear stability bound of the flow. Advisory.
double stability_margin(const ProblemInstance& inst, double lambda_max,
                        double alpha, double eta);

/// Integrates x' = -(a^T(a x - y) + lambda(t) tanh(alpha x)) with the
/// explicit Euler scheme, lambda(t) = max(0, schedule(eta k)) at bin left
/// endpoints. Throws DivergenceError when a state goes non-finite.
Trajectory euler_solve(const ProblemInstance& inst, const Vec& y,
                       const Schedule& schedule, double alpha,
                       const SolverConfig& cfg, const Vec& x0);

/// Constant-regularization fast path; bit-identical to euler_solve with a
/// constant schedule.
Trajectory euler_solve_const(const ProblemInstance& inst, const Vec& y,
                             double lambda, double alpha,
                             const SolverConfig& cfg, const Vec& x0);

/// Recovery-error curve E||x(t) - s||^2 estimated over trials fresh
/// (signal, observation) pairs, all started from x0 = 0.
struct MseCurve {
  Vec times;
  Vec mse;
  std::size_t trials = 0;
};

/// Trial i (1-based) draws from rng.substream(i); the average runs in fixed
/// trial order, so results are reproducible regardless of scheduling.
MseCurve estimate_mse_curve(const ProblemInstance& inst, const Schedule& schedule,
                            double alpha, const SolverConfig& cfg,
                            std::size_t trials, const RngStream& rng);

}  // namespace lassoflow

#endif

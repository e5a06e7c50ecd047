#ifndef LASSOFLOW_IO_HPP
#define LASSOFLOW_IO_HPP

#include <string>
#include <vector>

#include "lassoflow/analysis.hpp"
#include "lassoflow/flow.hpp"
#include "lassoflow/schedule.hpp"
#include "lassoflow/unfold.hpp"

namespace lassoflow::io {

// CSV dialect used everywhere: UTF-8, LF line endings, comma separator,
// '.' decimal point, one header row, doubles printed with %.17g so files are
// byte-stable and round-trip exactly.

std::string format_double(double v);

/// Header t,x_1..x_n; one row per recorded state.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Header t,mse.
void write_mse_csv(const MseCurve& curve, const std::string& path);

/// Header t,rho,theory.
void write_ratio_csv(const RatioCurve& curve, const std::string& path);

/// Header lambda,mse_inf,force_norm,omega1.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Header iter,loss; iterations are 1-based.
void write_loss_csv(const Vec& losses, const std::string& path);

/// Header t,lambda; the schedule sampled on a uniform grid.
void write_schedule_curve_csv(const Schedule& schedule, double t_end, double dt,
                              const std::string& path);

/// Header t,u_trained,u_exact.
void write_control_csv(const ControlDemoResult& result, const std::string& path);

/// Two-column table with an arbitrary header, e.g. the bins-vs-MSE sweep.
void write_pairs_csv(const std::string& header, const std::vector<double>& first,
                     const std::vector<double>& second, const std::string& path);

}  // namespace lassoflow::io

#endif

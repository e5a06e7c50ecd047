#include "lassoflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lassoflow::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  out << '\n';
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    out << format_double(traj.times[r]);
    for (double v : traj.states[r]) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

void write_mse_csv(const MseCurve& curve, const std::string& path) {
  auto out = open_out(path);
  out << "t,mse\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    out << format_double(curve.times[i]) << ',' << format_double(curve.mse[i]) << '\n';
  finish(out, path);
}

void write_ratio_csv(const RatioCurve& curve, const std::string& path) {
  auto out = open_out(path);
  out << "t,rho,theory\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    out << format_double(curve.times[i]) << ',' << format_double(curve.rho[i])
        << ',' << format_double(curve.theory[i]) << '\n';
  finish(out, path);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "lambda,mse_inf,force_norm,omega1\n";
  for (const SweepRow& r : rows)
    out << format_double(r.lambda) << ',' << format_double(r.mse_inf) << ','
        << format_double(r.force_norm) << ',' << format_double(r.omega1) << '\n';
  finish(out, path);
}

void write_loss_csv(const Vec& losses, const std::string& path) {
  auto out = open_out(path);
  out << "iter,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << (i + 1) << ',' << format_double(losses[i]) << '\n';
  finish(out, path);
}

void write_schedule_curve_csv(const Schedule& schedule, double t_end, double dt,
                              const std::string& path) {
  if (!(dt > 0.0) || !(t_end >= 0.0))
    throw std::invalid_argument("write_schedule_curve_csv: bad grid");
  auto out = open_out(path);
  out << "t,lambda\n";
  const std::size_t steps = static_cast<std::size_t>(t_end / dt + 0.5);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = dt * static_cast<double>(i);
    out << format_double(t) << ',' << format_double(schedule.eval(t)) << '\n';
  }
  finish(out, path);
}

void write_control_csv(const ControlDemoResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "t,u_trained,u_exact\n";
  for (std::size_t i = 0; i < result.times.size(); ++i)
    out << format_double(result.times[i]) << ',' << format_double(result.u_trained[i])
        << ',' << format_double(result.u_exact[i]) << '\n';
  finish(out, path);
}

void write_pairs_csv(const std::string& header, const std::vector<double>& first,
                     const std::vector<double>& second, const std::string& path) {
  if (first.size() != second.size())
    throw std::invalid_argument("write_pairs_csv: column length mismatch");
  auto out = open_out(path);
  out << header << '\n';
  for (std::size_t i = 0; i < first.size(); ++i)
    out << format_double(first[i]) << ',' << format_double(second[i]) << '\n';
  finish(out, path);
}

}  // namespace lassoflow::io

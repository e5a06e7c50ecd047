#ifndef LASSOFLOW_SCHEDULE_HPP
#define LASSOFLOW_SCHEDULE_HPP

#include <string>
#include <variant>

#include "lassoflow/linalg.hpp"

namespace lassoflow {

/// Weighted sum of Gaussian bumps: eval(t) = sum_i w_i exp(-beta (t - c_i)^2).
/// Centers must be strictly increasing, beta positive. The weights are the
/// trainable part; eval is linear in them.
class RBFSchedule {
 public:
  RBFSchedule(Vec weights, Vec centers, double beta);

  double eval(double t) const;
  /// basis(t)[i] = exp(-beta (t - c_i)^2), so eval(t) = dot(weights, basis(t)).
  /// This is also d eval / d w.
  void basis(double t, double* out) const;
  Vec basis(double t) const;

  const Vec& weights() const { return weights_; }
  const Vec& centers() const { return centers_; }
  double beta() const { return beta_; }
  std::size_t size() const { return weights_.size(); }

  RBFSchedule with_weights(Vec w) const { return RBFSchedule(std::move(w), centers_, beta_); }

 private:
  Vec weights_;
  Vec centers_;
  double beta_;
};

/// Evenly spaced center grid c_i = spacing * i - offset for i = 1..count.
Vec make_centers(std::size_t count, double spacing, double offset);

/// Either a constant value or an RBF curve.
class Schedule {
 public:
  static Schedule constant(double value);
  static Schedule rbf(RBFSchedule s);

  double eval(double t) const;
  bool is_constant() const { return std::holds_alternative<double>(v_); }
  double constant_value() const { return std::get<double>(v_); }
  const RBFSchedule* rbf_schedule() const { return std::get_if<RBFSchedule>(&v_); }

 private:
  explicit Schedule(std::variant<double, RBFSchedule> v) : v_(std::move(v)) {}
  std::variant<double, RBFSchedule> v_;
};

/// Text format: first line is beta, then one "center weight" pair per line.
void save_schedule(const RBFSchedule& s, const std::string& path);
RBFSchedule load_schedule(const std::string& path);

}  // namespace lassoflow

#endif

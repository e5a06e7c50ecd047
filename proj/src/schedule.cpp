#include "lassoflow/schedule.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lassoflow/io.hpp"

namespace lassoflow {

RBFSchedule::RBFSchedule(Vec weights, Vec centers, double beta)
    : weights_(std::move(weights)), centers_(std::move(centers)), beta_(beta) {
  if (weights_.empty() || weights_.size() != centers_.size())
    throw std::invalid_argument("RBFSchedule: weights and centers must have equal nonzero length");
  if (!(beta_ > 0.0))
    throw std::invalid_argument("RBFSchedule: beta must be positive");
  for (std::size_t i = 1; i < centers_.size(); ++i)
    if (!(centers_[i] > centers_[i - 1]))
      throw std::invalid_argument("RBFSchedule: centers must be strictly increasing");
}

double RBFSchedule::eval(double t) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double d = t - centers_[i];
    acc += weights_[i] * std::exp(-beta_ * d * d);
  }
  return acc;
}

void RBFSchedule::basis(double t, double* out) const {
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const double d = t - centers_[i];
    out[i] = std::exp(-beta_ * d * d);
  }
}

Vec RBFSchedule::basis(double t) const {
  Vec out(size());
  basis(t, out.data());
  return out;
}

Vec make_centers(std::size_t count, double spacing, double offset) {
  if (count == 0) throw std::invalid_argument("make_centers: count must be positive");
  Vec c(count);
  for (std::size_t i = 0; i < count; ++i)
    c[i] = spacing * static_cast<double>(i + 1) - offset;
  return c;
}

Schedule Schedule::constant(double value) {
  if (!std::isfinite(value))
    throw std::invalid_argument("Schedule: constant value must be finite");
  return Schedule(std::variant<double, RBFSchedule>(value));
}

Schedule Schedule::rbf(RBFSchedule s) {
  return Schedule(std::variant<double, RBFSchedule>(std::move(s)));
}

double Schedule::eval(double t) const {
  if (const double* v = std::get_if<double>(&v_)) return *v;
  return std::get<RBFSchedule>(v_).eval(t);
}

void save_schedule(const RBFSchedule& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_schedule: cannot open " + path);
  out << io::format_double(s.beta()) << '\n';
  for (std::size_t i = 0; i < s.size(); ++i)
    out << io::format_double(s.centers()[i]) << ' '
        << io::format_double(s.weights()[i]) << '\n';
  if (!out) throw std::runtime_error("save_schedule: write failed for " + path);
}

RBFSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_schedule: cannot open " + path);
  double beta = 0.0;
  if (!(in >> beta)) throw std::runtime_error("load_schedule: missing beta in " + path);
  Vec centers;
  Vec weights;
  double c = 0.0;
  double w = 0.0;
  while (in >> c >> w) {
    centers.push_back(c);
    weights.push_back(w);
  }
  if (centers.empty())
    throw std::runtime_error("load_schedule: no center/weight pairs in " + path);
  return RBFSchedule(std::move(weights), std::move(centers), beta);
}

}  // namespace lassoflow

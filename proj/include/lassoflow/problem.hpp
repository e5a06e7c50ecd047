#ifndef LASSOFLOW_PROBLEM_HPP
#define LASSOFLOW_PROBLEM_HPP

#include <cstdint>
#include <string>

#include "lassoflow/linalg.hpp"
#include "lassoflow/rng.hpp"

namespace lassoflow {

/// One ground-truth/observation pair of the linear model y = a*s + noise.
struct Observation {
  Vec s;
  Vec y;
};

/// A compressed-sensing instance: sensing matrix, noise level, and sparsity.
/// The Gram matrix a^T a and its spectrum bounds are precomputed so solvers
/// and stability checks can reuse them. Immutable after construction and
/// safe to share across trial workers.
class ProblemInstance {
 public:
  ProblemInstance(Mat a, double sigma, double p, std::uint64_t seed = 0);

  /// Draws the sensing matrix from rng (i.i.d. standard normal entries).
  static ProblemInstance generate(RngStream& rng, std::size_t m, std::size_t n,
                                  double sigma, double p);

  const Mat& a() const { return a_; }
  const Mat& gram() const { return gram_; }
  std::size_t m() const { return a_.rows(); }
  std::size_t n() const { return a_.cols(); }
  double sigma() const { return sigma_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  double gram_eig_min() const { return gram_eig_min_; }
  double gram_eig_max() const { return gram_eig_max_; }

 private:
  Mat a_;
  Mat gram_;
  double sigma_;
  double p_;
  std::uint64_t seed_;
  double gram_eig_min_;
  double gram_eig_max_;
};

/// Bernoulli-Gaussian draw: each entry is 0 with probability 1 - p and
/// standard normal otherwise.
Vec sample_signal(RngStream& rng, std::size_t n, double p);

/// y = a*s + noise with noise ~ N(0, sigma^2 I). sigma = 0 gives exactly a*s.
Observation observe(const ProblemInstance& inst, const Vec& s, RngStream& rng);

/// sum_i (x_i - s_i)^2
double squared_error(const Vec& x, const Vec& s);

/// Flat text format: a header line "m n sigma p seed" followed by the
/// row-major sensing matrix, one row per line.
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

}  // namespace lassoflow

#endif

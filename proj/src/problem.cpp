#include "lassoflow/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lassoflow/io.hpp"

namespace lassoflow {

ProblemInstance::ProblemInstance(Mat a, double sigma, double p, std::uint64_t seed)
    : a_(std::move(a)), sigma_(sigma), p_(p), seed_(seed) {
  if (!(sigma >= 0.0))
    throw std::invalid_argument("ProblemInstance: sigma must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("ProblemInstance: p must lie in [0, 1]");
  gram_ = gram_matrix(a_);
  const SymEig e = sym_eig(gram_);
  gram_eig_min_ = e.eigenvalues.front();
  gram_eig_max_ = e.eigenvalues.back();
}

ProblemInstance ProblemInstance::generate(RngStream& rng, std::size_t m,
                                          std::size_t n, double sigma, double p) {
  return ProblemInstance(sample_gaussian_matrix(rng, m, n), sigma, p, rng.seed());
}

Vec sample_signal(RngStream& rng, std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_signal: p must lie in [0, 1]");
  Vec s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform() <= p) s[i] = rng.normal();
  return s;
}

Observation observe(const ProblemInstance& inst, const Vec& s, RngStream& rng) {
  if (s.size() != inst.n())
    throw std::invalid_argument("observe: signal length mismatch");
  Vec y = matvec(inst.a(), s);
  const double sigma = inst.sigma();
  for (double& v : y) v += sigma * rng.normal();
  return Observation{s, std::move(y)};
}

double squared_error(const Vec& x, const Vec& s) {
  if (x.size() != s.size())
    throw std::invalid_argument("squared_error: length mismatch");
  return squared_distance(x, s);
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << inst.m() << ' ' << inst.n() << ' ' << io::format_double(inst.sigma())
      << ' ' << io::format_double(inst.p()) << ' ' << inst.seed() << '\n';
  for (std::size_t r = 0; r < inst.m(); ++r) {
    const double* row = inst.a().row(r);
    for (std::size_t c = 0; c < inst.n(); ++c) {
      if (c) out << ' ';
      out << io::format_double(row[c]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  std::size_t m = 0;
  std::size_t n = 0;
  double sigma = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  if (!(in >> m >> n >> sigma >> p >> seed))
    throw std::runtime_error("load_instance: malformed header in " + path);
  if (m == 0 || n == 0)
    throw std::runtime_error("load_instance: bad dimensions in " + path);
  Mat a(m, n);
  for (std::size_t i = 0; i < m * n; ++i)
    if (!(in >> a.data()[i]))
      throw std::runtime_error("load_instance: truncated matrix in " + path);
  return ProblemInstance(std::move(a), sigma, p, seed);
}

}  // namespace lassoflow

#ifndef LASSOFLOW_RNG_HPP
#define LASSOFLOW_RNG_HPP

#include <cstdint>

#include "lassoflow/linalg.hpp"

namespace lassoflow {

/// Splittable random stream. A (seed, stream) pair fully determines the
/// sample sequence: the internal xoshiro256++ state is derived by splitmix64
/// mixing of the pair, and substream(k) opens the independent stream
/// (seed, stream + k). Sequences are bit-reproducible within one build.
///
/// A stream has a single consumer; concurrent users take distinct stream ids.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  RngStream substream(std::uint64_t offset) const {
    return RngStream(seed_, stream_ + offset);
  }

  std::uint64_t next_u64();
  /// uniform in (0, 1]
  double uniform();
  /// standard normal via the Box-Muller transform (pairs are cached)
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// m x n matrix of i.i.d. standard normal entries drawn from rng.
Mat sample_gaussian_matrix(RngStream& rng, std::size_t m, std::size_t n);

}  // namespace lassoflow

#endif

#pragma once

#include <cstdint>

namespace adaptkde::rng {

//! SplitMix64 finalizer; the mixing primitive behind stream derivation.
std::uint64_t mix64(std::uint64_t z);

//! Derive an independent substream key from a master seed and up to three
//! labels (replication index, variable family, extra). The construction is
//! fixed by the test vectors in tests/test_rng.cpp.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0);

//! xoshiro256++ with all samplers implemented by explicit inversion or
//! rejection so draws are bit-reproducible across platforms.
class Stream
{
public:
  explicit Stream(std::uint64_t seed);

  std::uint64_t next_u64();
  //! uniform double in [0, 1)
  double uniform();
  //! standard normal (Box-Muller, pairwise cached)
  double normal();
  double exponential();
  //! centered Laplace with scale b
  double laplace(double b);
  //! Gamma(shape, rate 1), Marsaglia-Tsang
  double gamma(double shape);
  bool bernoulli(double p);

private:
  std::uint64_t state_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace adaptkde::rng

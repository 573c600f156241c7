#include "adaptkde/rng.hpp"

#include <cmath>

namespace adaptkde::rng {

std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c)
{
  std::uint64_t h = mix64(master);
  h = mix64(h ^ mix64(a ^ 0x8000000000000001ULL));
  h = mix64(h ^ mix64(b ^ 0x8000000000000002ULL));
  h = mix64(h ^ mix64(c ^ 0x8000000000000003ULL));
  return h;
}

namespace {

std::uint64_t rotl(std::uint64_t x, int k)
{
  return (x << k) | (x >> (64 - k));
}

} // namespace

Stream::Stream(std::uint64_t seed)
{
  // seed expansion via SplitMix64, all-zero state impossible
  std::uint64_t s = seed;
  for (auto& word : state_)
    word = mix64(s++);
}

std::uint64_t Stream::next_u64()
{
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Stream::uniform()
{
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0)
    u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double Stream::exponential()
{
  return -std::log1p(-uniform());
}

double Stream::laplace(double b)
{
  const double v = uniform() - 0.5;
  const double sign = v < 0.0 ? -1.0 : 1.0;
  return -b * sign * std::log1p(-2.0 * std::abs(v));
}

double Stream::gamma(double shape)
{
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0);
    double u = uniform();
    while (u <= 0.0)
      u = uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x)
      return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

bool Stream::bernoulli(double p)
{
  return uniform() < p;
}

} // namespace adaptkde::rng

#include "adaptkde/upper_functions.hpp"

#include "adaptkde/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace adaptkde;
using namespace adaptkde::upper_functions;

namespace {

const UniformGrid kGrid = UniformGrid::centered(1, 8.0, 1025);

Sample uniform_sample(Eigen::Index n, std::uint64_t seed)
{
  rng::Stream stream(seed);
  std::vector<double> data(n);
  for (auto& x : data)
    x = 4.0 * stream.uniform() - 2.0;
  return Sample(1, std::move(data));
}

UpperFunctionConfig unit_norms(double p, double c_scale = 1.0)
{
  UpperFunctionConfig cfg;
  cfg.p = p;
  cfg.c_scale = c_scale;
  cfg.norm1 = cfg.norm2 = cfg.normp = 1.0;
  return cfg;
}

} // namespace

TEST_CASE("p = 2 branch with unit norms")
{
  const auto cfg = unit_norms(2.0);
  const auto s = uniform_sample(100, 1);
  const double got =
    delta_m(s, kernels::ProductKernel::order_s(1,
                                               kernels::BaseDensity::gaussian,
                                               1),
            kernels::BandwidthVec({ 0.0625 }), kGrid, cfg);
  CHECK(got == doctest::Approx(9.0 / std::sqrt(6.25)).epsilon(1e-12));
  CHECK(got == doctest::Approx(3.6).epsilon(1e-12));
}

TEST_CASE("p = 1.5 branch with unit norms")
{
  const auto cfg = unit_norms(1.5);
  const auto s = uniform_sample(100, 1);
  const double got =
    delta_m(s, kernels::ProductKernel::order_s(1,
                                               kernels::BaseDensity::gaussian,
                                               1),
            kernels::BandwidthVec({ 0.0625 }), kGrid, cfg);
  CHECK(got ==
        doctest::Approx(128.0 * std::pow(6.25, 1.0 / 1.5 - 1.0))
          .epsilon(1e-12));
}

TEST_CASE("p <= 2 values are deterministic in the sample")
{
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 2);
  const kernels::BandwidthVec h({ 0.125 });
  const auto cfg = UpperFunctionConfig::for_kernel(K, 2.0);
  const double a = delta_m(uniform_sample(50, 1), K, h, kGrid, cfg);
  const double b = delta_m(uniform_sample(50, 999), K, h, kGrid, cfg);
  CHECK(a == b);
}

TEST_CASE("the majorant is exactly linear in c_scale")
{
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 2);
  const kernels::BandwidthVec h({ 0.125 });
  const auto s = uniform_sample(200, 4);
  for (const double p : { 1.5, 2.0, 4.0 }) {
    const auto base = UpperFunctionConfig::for_kernel(K, p, 1.0);
    auto scaled = base;
    scaled.c_scale = 3.0;
    CHECK(delta_m(s, K, h, kGrid, scaled) ==
          doctest::Approx(3.0 * delta_m(s, K, h, kGrid, base))
            .epsilon(1e-15));
  }
}

TEST_CASE("p = 4 dominates the theoretical lower bound on every draw")
{
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 1);
  const auto cfg = UpperFunctionConfig::for_kernel(K, 4.0);
  const kernels::BandwidthVec h({ 0.0625 });
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = uniform_sample(500, seed);
    const double mv = 500.0 * h.volume();
    const double bound = 960.0 * 4.0 * cfg.norm1 * cfg.normp /
                         std::log(4.0) / std::sqrt(mv);
    CHECK(delta_m(s, K, h, kGrid, cfg) >= bound);
  }
}

TEST_CASE("small samples are rejected")
{
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 1);
  const auto cfg = UpperFunctionConfig::for_kernel(K, 2.0);
  Sample tiny(1, { 0.0 });
  CHECK_THROWS_AS(delta_m(tiny, K, kernels::BandwidthVec({ 0.125 }), kGrid,
                          cfg),
                  InvalidParameter);
  CHECK_THROWS_AS(UpperFunctionConfig::for_kernel(K, 0.5), InvalidParameter);
  CHECK_THROWS_AS(UpperFunctionConfig::for_kernel(K, 2.0, -1.0),
                  InvalidParameter);
}

TEST_CASE("psi envelope branches")
{
  const auto cfg2 = unit_norms(2.0);
  const auto at = [&](const UpperFunctionConfig& cfg, double volume) {
    return psi_bounds(100, kernels::BandwidthVec({ volume }), cfg);
  };

  SUBCASE("p = 2 is non-random: lower equals upper")
  {
    const auto b = at(cfg2, 0.0625);
    CHECK(b.lower == b.upper_form);
    CHECK(b.lower == doctest::Approx(3.6).epsilon(1e-12));
  }
  SUBCASE("doubling the volume scales the p = 2 envelope by 2^{-1/2}")
  {
    CHECK(at(cfg2, 0.125).lower ==
          doctest::Approx(at(cfg2, 0.0625).lower / std::sqrt(2.0))
            .epsilon(1e-12));
  }
  SUBCASE("p = 1 has a volume-free envelope")
  {
    const auto cfg1 = unit_norms(1.0);
    CHECK(at(cfg1, 0.125).lower ==
          doctest::Approx(at(cfg1, 0.03125).lower).epsilon(1e-13));
  }
  SUBCASE("p > 2 upper envelope uses the diagnostic multiplier")
  {
    const auto cfg4 = unit_norms(4.0);
    const auto b = at(cfg4, 0.0625);
    CHECK(b.upper_form == doctest::Approx(4.0 * b.lower).epsilon(1e-13));
  }
}

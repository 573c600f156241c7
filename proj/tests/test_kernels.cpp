#include "adaptkde/kernels.hpp"

#include "adaptkde/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace adaptkde;
using namespace adaptkde::kernels;

namespace {

constexpr double kPi = 3.14159265358979323846;

//! Composite Simpson quadrature of fn over [-radius, radius].
template <typename F>
double simpson(F fn, double radius, int n)
{
  if (n % 2)
    ++n;
  const double step = 2.0 * radius / n;
  double acc = fn(-radius) + fn(radius);
  for (int i = 1; i < n; ++i)
    acc += fn(-radius + i * step) * (i % 2 ? 4.0 : 2.0);
  return acc * step / 3.0;
}

double moment(const Kernel1D& k, int power)
{
  return simpson(
    [&](double y) { return std::pow(y, power) * k.eval(y); },
    k.quadrature_radius(), 1 << 16);
}

} // namespace

TEST_CASE("order-s kernels integrate to one with vanishing moments")
{
  for (const auto base : { BaseDensity::gaussian, BaseDensity::bump }) {
    for (int s = 1; s <= 4; ++s) {
      OrderSKernel1D k(base, s);
      CHECK(moment(k, 0) == doctest::Approx(1.0).epsilon(1e-8));
      for (int power = 1; power < s; ++power)
        CHECK(std::abs(moment(k, power)) < 1e-6);
    }
  }
}

TEST_CASE("order-1 gaussian kernel is the standard normal density")
{
  OrderSKernel1D k(BaseDensity::gaussian, 1);
  for (const double y : { 0.0, 0.5, -1.3, 2.7 }) {
    const double phi = std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi);
    CHECK(k.eval(y) == doctest::Approx(phi).epsilon(1e-14));
  }
}

TEST_CASE("order-s derivatives match central finite differences")
{
  const double step = 1e-4;
  for (const auto base : { BaseDensity::gaussian, BaseDensity::bump }) {
    OrderSKernel1D k(base, 3);
    REQUIRE(k.has_derivatives());
    for (const double y : { 0.0, 0.3, -0.8, 1.7 }) {
      const double fd1 = (k.eval(y + step) - k.eval(y - step)) / (2 * step);
      CHECK(k.derivative(y, 1) == doctest::Approx(fd1).epsilon(1e-5));
      const double fd2 =
        (k.eval(y + step) - 2 * k.eval(y) + k.eval(y - step)) / (step * step);
      CHECK(k.derivative(y, 2) == doctest::Approx(fd2).epsilon(1e-4));
    }
  }
}

TEST_CASE("bump base kernel is supported on [-s, s]")
{
  for (int s = 1; s <= 3; ++s) {
    OrderSKernel1D k(BaseDensity::bump, s);
    CHECK(k.eval(s + 0.01) == 0.0);
    CHECK(k.eval(-s - 0.01) == 0.0);
    CHECK(k.eval(0.0) != 0.0);
  }
}

TEST_CASE("order-s kernels are invalid for s < 1")
{
  CHECK_THROWS_AS(OrderSKernel1D(BaseDensity::gaussian, 0), InvalidParameter);
}

TEST_CASE("band-limited kernel frequency profile")
{
  BandLimitedKernel1D k;
  REQUIRE(k.has_fourier());
  CHECK(k.fourier(0.0) == 1.0);
  CHECK(k.fourier(0.7) == 1.0);
  CHECK(k.fourier(-1.0) == 1.0);
  CHECK(k.fourier(1.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(k.fourier(2.0) == doctest::Approx(0.0));
  CHECK(k.fourier(3.0) == 0.0);
}

TEST_CASE("band-limited kernel matches its inverse Fourier integral")
{
  // K(x) = (1/2pi) int K_check(t) exp(itx) dt over the compact support
  BandLimitedKernel1D k;
  auto inverse = [&](double x) {
    return simpson(
             [&](double t) { return k.fourier(t) * std::cos(t * x); }, 2.0,
             1 << 14) /
           (2.0 * kPi);
  };
  CHECK(k.eval(0.0) == doctest::Approx(3.0 / (2.0 * kPi)).epsilon(1e-14));
  for (const double x : { 0.0, 0.4, 1.0, kPi, 2.0 * kPi, 5.2, -3.3 })
    CHECK(k.eval(x) == doctest::Approx(inverse(x)).epsilon(1e-8));
}

TEST_CASE("band-limited kernel is stable near its removable singularities")
{
  BandLimitedKernel1D k;
  // x = pi makes the closed form 0/0; the limit is -1/(4 pi)
  CHECK(k.eval(kPi) == doctest::Approx(-1.0 / (4.0 * kPi)).epsilon(1e-10));
  CHECK(k.eval(kPi + 1e-9) == doctest::Approx(k.eval(kPi)).epsilon(1e-6));
  CHECK(k.eval(-kPi) == doctest::Approx(k.eval(kPi)).epsilon(1e-14));
  CHECK(k.eval(1e-12) == doctest::Approx(k.eval(0.0)).epsilon(1e-10));
}

TEST_CASE("bandwidth vectors validate their range")
{
  CHECK_THROWS_AS(BandwidthVec({ 0.0 }), InvalidParameter);
  CHECK_THROWS_AS(BandwidthVec({ 1.5 }), InvalidParameter);
  CHECK_THROWS_AS(BandwidthVec({ -0.25 }), InvalidParameter);
  CHECK_THROWS_AS(BandwidthVec(std::vector<double>{}), InvalidParameter);

  const BandwidthVec h({ 0.5, 0.25 });
  CHECK(h.volume() == 0.125);
  CHECK(h[1] == 0.25);

  const auto dyadic = BandwidthVec::dyadic({ 3, 1 });
  CHECK(dyadic[0] == 0.125);
  CHECK(dyadic[1] == 0.5);
}

TEST_CASE("product kernel norms against closed-form gaussian values")
{
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 1);
  // ||phi||_1 = 1, ||phi||_2 = (2 sqrt(pi))^{-1/2}
  CHECK(K.norm(1.0) == doctest::Approx(1.0).epsilon(1e-6));
  const double l2 = 1.0 / std::sqrt(2.0 * std::sqrt(kPi));
  CHECK(K.norm(2.0) == doctest::Approx(l2).epsilon(1e-6));
  CHECK_THROWS_AS(K.norm(0.5), InvalidParameter);

  // product structure: d = 2 norm is the square of the 1-d norm
  const auto K2 = ProductKernel::order_s(2, BaseDensity::gaussian, 1);
  CHECK(K2.norm(2.0) == doctest::Approx(l2 * l2).epsilon(1e-6));
}

TEST_CASE("scaled kernel evaluation carries the volume factor")
{
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 2);
  const BandwidthVec h({ 0.25 });
  const double t = 0.1;
  const double y = t / h[0];
  CHECK(eval_scaled(K, h, &t) ==
        doctest::Approx(K.eval(&y) / h.volume()).epsilon(1e-14));
}

TEST_CASE("gridded kernel integrates to one on aligned nodes")
{
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 2);
  const BandwidthVec h({ 0.25 });
  const std::vector<double> spacing{ 1.0 / 64.0 };
  const auto g = kernel_on_grid(K, h, spacing, 16.0);
  CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-6));
  // zero-centered with nodes on integer multiples of the spacing
  CHECK(g.grid.lower()[0] == doctest::Approx(-g.grid.upper()[0]));
  const double ratio = g.grid.lower()[0] / spacing[0];
  CHECK(ratio == doctest::Approx(std::round(ratio)).epsilon(1e-12));
}

TEST_CASE("pairwise kernel equals the gaussian convolution identity")
{
  // phi_h * phi_eta = phi_{sqrt(h^2 + eta^2)} for the order-1 gaussian base
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 1);
  const BandwidthVec h({ 0.25 }), eta({ 0.125 });
  const auto grid = UniformGrid::centered(1, 8.0, 1025);
  const auto pair = pair_kernel(K, h, eta, grid);
  const double sigma = std::hypot(h[0], eta[0]);
  for (Eigen::Index i = 0; i < pair.values.size(); i += 97) {
    const double x = pair.grid.coord(0, i);
    const double expected =
      std::exp(-0.5 * x * x / (sigma * sigma)) /
      (sigma * std::sqrt(2.0 * kPi));
    CHECK(pair.values[i] == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("pairwise kernel is symmetric in its bandwidth arguments")
{
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 2);
  const BandwidthVec h({ 0.5 }), eta({ 0.125 });
  const auto grid = UniformGrid::centered(1, 4.0, 257);
  const auto a = pair_kernel(K, h, eta, grid);
  const auto b = pair_kernel(K, eta, h, grid);
  REQUIRE(a.values.size() == b.values.size());
  CHECK((a.values == b.values).all());
}

TEST_CASE("gridded kernel derivative matches scaled evaluation")
{
  const auto K = ProductKernel::order_s(1, BaseDensity::gaussian, 2);
  const BandwidthVec h({ 0.25 });
  const std::vector<int> m{ 1 };
  const std::vector<double> spacing{ 1.0 / 64.0 };
  const auto g = kernel_derivative_on_grid(K, h, m, spacing, 16.0);
  for (Eigen::Index i = 0; i < g.values.size(); i += 13) {
    const double x = g.grid.coord(0, i);
    CHECK(g.values[i] ==
          doctest::Approx(eval_scaled_derivative(K, h, m, &x))
            .epsilon(1e-12));
  }
}

TEST_CASE("band-limited kernel has no analytic derivatives")
{
  const auto K = ProductKernel::band_limited(1);
  CHECK(!K.has_derivatives());
  CHECK_THROWS_AS(K.factor(0).derivative(0.0, 1), UnsupportedOperation);
}

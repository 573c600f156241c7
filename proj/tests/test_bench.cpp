#include "adaptkde/bench.hpp"

#include "adaptkde/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace adaptkde;
using namespace adaptkde::bench;

namespace {

constexpr double kPi = 3.14159265358979323846;

models::DensitySpec standard_normal()
{
  return models::DensitySpec::gaussian_mixture({ { 1.0, { 0.0 }, { 1.0 } } });
}

ExperimentSpec density_experiment(double c_scale = 0.2)
{
  return ExperimentSpec{ standard_normal(),
                         std::nullopt,
                         0.0,
                         selector::ProblemSpec::density(),
                         kernels::ProductKernel::order_s(
                           1, kernels::BaseDensity::gaussian, 2),
                         bandwidths::GridMode::full,
                         c_scale,
                         UniformGrid::centered(1, 8.0, 1025),
                         estimators::EvalMethod::binned_fft,
                         std::nullopt };
}

RiskReport synthetic_report(double exponent, double noise_frac,
                            double theoretical)
{
  RiskReport report;
  report.theoretical_exponent = theoretical;
  rng::Stream stream(3);
  int sign = 1;
  for (const Eigen::Index n : { 1024, 4096, 16384, 65536 }) {
    RiskRow row;
    row.n = n;
    row.method = "selected";
    sign = -sign;
    row.risk = 3.0 * std::pow(static_cast<double>(n), exponent) *
               (1.0 + noise_frac * sign);
    report.rows.push_back(row);
  }
  return report;
}

} // namespace

TEST_CASE("closed-form rate exponents")
{
  SUBCASE("direct density, d = 1, p = 2, beta = 2")
  {
    const auto rate = theoretical_rate(RateProblem::density, { 2.0 }, {},
                                       2.0);
    CHECK(rate.n_exponent == doctest::Approx(-0.4).epsilon(1e-15));
  }
  SUBCASE("first derivative at beta = 2 (omega = 2)")
  {
    const auto rate = theoretical_rate(RateProblem::derivative, { 2.0 },
                                       { 1 }, 2.0);
    CHECK(rate.n_exponent == doctest::Approx(-0.2).epsilon(1e-15));
  }
  SUBCASE("sobolev deconvolution, beta_1 = 2, mu_1 = 2")
  {
    const auto rate = theoretical_rate(RateProblem::sobolev_deconv_B,
                                       { 2.0, 2.0 }, {}, 2.0);
    CHECK(rate.n_exponent == doctest::Approx(-2.0 / 9.0).epsilon(1e-15));
    CHECK(rate.L_exponent == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    const auto noise = theoretical_rate(RateProblem::sobolev_deconv_A,
                                        { 2.0, 2.0 }, {}, 2.0);
    CHECK(noise.n_exponent == doctest::Approx(-4.0 / 9.0).epsilon(1e-15));
  }
  SUBCASE("anisotropic aggregation uses the harmonic smoothness")
  {
    // 1/beta = 1/2 + 1/2 = 1, a = 1/2 -> n-exponent -1/3
    const auto rate = theoretical_rate(RateProblem::density, { 2.0, 2.0 },
                                       {}, 2.0);
    CHECK(rate.n_exponent == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("inconsistency region is rejected")
  {
    CHECK_THROWS_AS(theoretical_rate(RateProblem::derivative, { 2.0 }, { 2 },
                                     2.0),
                    OutOfValidity);
    CHECK_THROWS_AS(theoretical_rate(RateProblem::density, { -1.0 }, {},
                                     2.0),
                    InvalidParameter);
  }
}

TEST_CASE("slope fitting on synthetic power laws")
{
  SUBCASE("exact power law recovers the exponent to machine precision")
  {
    const auto fit = rate_fit(synthetic_report(-0.4, 0.0, -0.4));
    CHECK(fit.slope == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(fit.pass);
  }
  SUBCASE("five percent multiplicative noise stays within tolerance")
  {
    const auto fit = rate_fit(synthetic_report(-0.4, 0.05, -0.4));
    CHECK(std::abs(fit.slope + 0.4) < 0.05);
    CHECK(fit.pass);
  }
  SUBCASE("constant risks fit slope zero")
  {
    const auto fit = rate_fit(synthetic_report(0.0, 0.0, 0.0));
    CHECK(fit.slope == doctest::Approx(0.0));
  }
  SUBCASE("insufficient ladders are rejected")
  {
    auto report = synthetic_report(-0.4, 0.0, -0.4);
    report.rows.resize(2);
    CHECK_THROWS_AS(rate_fit(report), InvalidParameter);

    auto narrow = synthetic_report(-0.4, 0.0, -0.4);
    for (auto& row : narrow.rows)
      row.n = 1024 + (&row - narrow.rows.data());
    CHECK_THROWS_AS(rate_fit(narrow), InvalidParameter);
  }
}

TEST_CASE("risk config validation")
{
  RiskConfig cfg;
  cfg.sizes = { 64, 128 };
  cfg.replications = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.replications = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.replications = 2;
  cfg.sizes = { 128, 128 };
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.sizes = {};
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("monte carlo risks are deterministic and parallel-safe")
{
  RiskConfig cfg;
  cfg.sizes = { 64, 128 };
  cfg.replications = 4;
  cfg.seed = 42;
  const auto spec = density_experiment();
  const auto target = spec.density.on_grid(spec.eval_grid);

  const auto a = mc_risk(cfg, spec, target, 1);
  const auto b = mc_risk(cfg, spec, target, 4);
  REQUIRE(a.rows.size() == 2);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].risk == b.rows[i].risk);
    CHECK(a.rows[i].per_replication == b.rows[i].per_replication);
    CHECK(a.rows[i].risk > 0.0);
    CHECK(a.rows[i].mc_stderr > 0.0);
    CHECK(a.rows[i].method == "selected");
  }
}

TEST_CASE("fixed-bandwidth risk matches a bias-variance envelope")
{
  RiskConfig cfg;
  cfg.sizes = { 4096 };
  cfg.replications = 24;
  cfg.seed = 11;
  auto spec = density_experiment();
  spec.fixed_h = kernels::BandwidthVec({ 0.0625 });
  const auto target = spec.density.on_grid(spec.eval_grid);
  const auto report = mc_risk(cfg, spec, target, 4);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].method == "fixed_h");

  const double bias = estimators::bias_profile(target, spec.kernel,
                                               *spec.fixed_h, 2.0);
  // variance envelope ||K||_2 (n V_h)^{-1/2}
  const double envelope =
    spec.kernel.norm(2.0) / std::sqrt(2048.0 * spec.fixed_h->volume());
  const double predicted = std::hypot(bias, envelope);
  CHECK(report.rows[0].risk > predicted / 2.0);
  CHECK(report.rows[0].risk < predicted * 2.0);
}

TEST_CASE("oracle ratios never drop below one")
{
  RiskConfig cfg;
  cfg.sizes = { 256 };
  cfg.replications = 6;
  cfg.seed = 2;
  const auto spec = density_experiment();
  const auto target = spec.density.on_grid(spec.eval_grid);
  const auto rows = oracle_ratio(cfg, spec, target, 4);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ratios.size() == 6);
  for (const double ratio : rows[0].ratios)
    CHECK(ratio >= 1.0);
  CHECK(rows[0].median_ratio >= 1.0);
  CHECK(rows[0].q90_ratio >= rows[0].median_ratio);
}

TEST_CASE("nikolskii class membership")
{
  const auto grid = UniformGrid::centered(1, 8.0, 1025);
  const auto f = standard_normal().on_grid(grid);

  SUBCASE("the zero function is in every class")
  {
    GriddedFunction zero(grid);
    const auto res = nikolskii_check(
      zero, SmoothnessSpec::nikolskii({ 2.0 }, 0.5, 2.0, { 3 }));
    CHECK(res.max_ratio == 0.0);
    CHECK(res.passes);
  }
  SUBCASE("the standard normal passes with L = 1 and fails with L = 0.01")
  {
    const auto pass = nikolskii_check(
      f, SmoothnessSpec::nikolskii({ 2.0 }, 1.0, 2.0, { 3 }));
    CHECK(pass.passes);
    CHECK(pass.norm_value ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::sqrt(kPi)))
            .epsilon(1e-4));

    const auto fail = nikolskii_check(
      f, SmoothnessSpec::nikolskii({ 2.0 }, 0.01, 2.0, { 3 }));
    CHECK(!fail.passes);
  }
  SUBCASE("spec validation")
  {
    CHECK_THROWS_AS(SmoothnessSpec::nikolskii({ 2.0 }, 1.0, 2.0, { 2 }),
                    InvalidParameter);
    CHECK_THROWS_AS(SmoothnessSpec::nikolskii({ -2.0 }, 1.0, 2.0, { 3 }),
                    InvalidParameter);
  }
}

TEST_CASE("sobolev integral matches the gaussian closed form")
{
  const auto grid = UniformGrid::centered(1, 16.0, 2049);
  const auto f = standard_normal().on_grid(grid);

  // (2 pi)^{-1} int (1 + t^2) exp(-t^2) dt = (3/2) sqrt(pi) / (2 pi)
  const double expected = 1.5 * std::sqrt(kPi) / (2.0 * kPi);
  const auto res = sobolev_check(f, 1.0, 1.0);
  CHECK(res.integral_value == doctest::Approx(expected).epsilon(1e-2));
  CHECK(res.passes);

  GriddedFunction zero(grid);
  CHECK(sobolev_check(zero, 1.0, 0.1).integral_value == 0.0);

  GriddedFunction doubled(grid, 2.0 * f.values);
  CHECK(sobolev_check(doubled, 1.0, 10.0).integral_value ==
        doctest::Approx(4.0 * res.integral_value).epsilon(1e-12));

  const auto grid2 = UniformGrid({ 0.0, 0.0 }, { 1.0, 1.0 }, { 4, 4 });
  CHECK_THROWS_AS(sobolev_check(GriddedFunction(grid2), 1.0, 1.0),
                  UnsupportedOperation);
}

TEST_CASE("kolmogorov-type embedding constant")
{
  const auto grid = UniformGrid::centered(1, 8.0, 2049);
  const auto spec = SmoothnessSpec::nikolskii({ 2.0 }, 1.0, 2.0, { 3 });

  SUBCASE("gaussian first derivative against the closed form")
  {
    const auto res = kolmogorov_check(standard_normal(), { 1 }, spec, 2.0,
                                      grid);
    // ||phi'||_2 = (4 sqrt(pi))^{-1/2}
    CHECK(res.lhs ==
          doctest::Approx(std::sqrt(1.0 / (4.0 * std::sqrt(kPi))))
            .epsilon(1e-4));
    CHECK(res.ratio > 0.0);
  }
  SUBCASE("order zero degenerates to ratio one")
  {
    const auto res = kolmogorov_check(standard_normal(), { 0 }, spec, 2.0,
                                      grid);
    CHECK(res.ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("the ratio is stable across the scaling family")
  {
    // the class constant is measured per member: L scales with lambda, so
    // the implied embedding constant is scale-free
    std::vector<double> ratios;
    for (const double lambda : { 0.5, 1.0, 2.0 }) {
      const auto f = models::DensitySpec::gaussian_mixture(
        { { 1.0, { 0.0 }, { 1.0 / lambda } } });
      const auto probe = nikolskii_check(
        f.on_grid(grid), SmoothnessSpec::nikolskii({ 2.0 }, 1e12, 2.0, { 3 }));
      // the embedding constant is driven by the difference seminorm alone
      const double L = probe.max_ratio;
      const auto scaled = SmoothnessSpec::nikolskii({ 2.0 }, L, 2.0, { 3 });
      ratios.push_back(kolmogorov_check(f, { 1 }, scaled, 2.0, grid).ratio);
    }
    for (const double r : ratios) {
      CHECK(r <= ratios[1] * 1.2);
      CHECK(r >= ratios[1] * 0.8);
    }
  }
  SUBCASE("validity region")
  {
    CHECK_THROWS_AS(kolmogorov_check(standard_normal(), { 2 }, spec, 2.0,
                                     grid),
                    OutOfValidity);
    CHECK_THROWS_AS(kolmogorov_check(models::DensitySpec::bessel_k(1.25),
                                     { 1 }, spec, 2.0, grid),
                    UnsupportedOperation);
  }
}

TEST_CASE("risk report CSV shape")
{
  const auto report = synthetic_report(-0.4, 0.0, -0.4);
  std::ostringstream os;
  write_csv(os, report, "demo");
  const std::string text = os.str();
  CHECK(text.find("# demo") == 0);
  CHECK(text.find("n,method,risk,mc_stderr") != std::string::npos);
  CHECK(text.find("1024,selected,") != std::string::npos);
}

#include "adaptkde/selector.hpp"

#include "adaptkde/numerics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace adaptkde;
using namespace adaptkde::selector;

namespace {

const UniformGrid kToyGrid = UniformGrid::centered(1, 1.0, 5);

bandwidths::DyadicGrid toy_grid()
{
  return bandwidths::DyadicGrid{
    1, 100, bandwidths::GridMode::full,
    { kernels::BandwidthVec({ 0.5 }), kernels::BandwidthVec({ 0.25 }),
      kernels::BandwidthVec({ 0.125 }) }
  };
}

struct ToyInstance
{
  bandwidths::DyadicGrid grid = toy_grid();
  EstimateMap estimates;
  PairMap pairs;
  PsiMap psi;
};

ToyInstance random_instance(std::uint64_t seed, double psi_scale)
{
  ToyInstance toy;
  rng::Stream stream(seed);
  auto random_fn = [&] {
    GriddedFunction f(kToyGrid);
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
      f.values[i] = stream.uniform();
    return f;
  };
  for (const auto& h : toy.grid.members) {
    toy.estimates.emplace(h.h(), random_fn());
    toy.psi.emplace(h.h(), psi_scale * stream.uniform());
  }
  for (std::size_t i = 0; i < toy.grid.members.size(); ++i)
    for (std::size_t j = i; j < toy.grid.members.size(); ++j)
      toy.pairs.emplace(
        make_pair_key(toy.grid.members[i], toy.grid.members[j]), random_fn());
  return toy;
}

//! Brute-force recomputation of the selection rule from its definition.
struct BruteForce
{
  std::vector<double> r_hat;
  std::vector<double> criterion;
  std::size_t argmin = 0;
};

BruteForce brute_force(const ToyInstance& toy, double p)
{
  BruteForce out;
  for (const auto& h : toy.grid.members) {
    double sup = 0.0;
    for (const auto& eta : toy.grid.members) {
      const auto& pair = toy.pairs.at(make_pair_key(h, eta));
      const auto& single = toy.estimates.at(eta.h());
      double norm_p = 0.0;
      for (Eigen::Index i = 0; i < pair.values.size(); ++i)
        norm_p += std::pow(std::abs(pair.values[i] - single.values[i]), p) *
                  kToyGrid.cell_volume();
      const double term =
        std::pow(norm_p, 1.0 / p) - 2.0 * toy.psi.at(eta.h());
      sup = std::max(sup, term);
    }
    out.r_hat.push_back(std::max(sup, 0.0));
    out.criterion.push_back(out.r_hat.back() + 2.0 * toy.psi.at(h.h()));
  }
  for (std::size_t i = 1; i < out.criterion.size(); ++i)
    if (out.criterion[i] < out.criterion[out.argmin])
      out.argmin = i;
  return out;
}

} // namespace

TEST_CASE("toy instance matches the brute-force oracle exactly")
{
  const auto toy = random_instance(7, 0.1);
  const auto oracle = brute_force(toy, 2.0);
  const auto result = select(toy.grid, toy.estimates, toy.pairs, toy.psi,
                             2.0);
  REQUIRE(result.table.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.table[i].r_hat == doctest::Approx(oracle.r_hat[i]));
    CHECK(result.table[i].criterion ==
          doctest::Approx(oracle.criterion[i]));
  }
  CHECK(result.chosen == toy.grid.members[oracle.argmin]);
}

TEST_CASE("huge majorants clip every comparison and select maximal volume")
{
  auto toy = random_instance(11, 0.0);
  for (auto& [key, value] : toy.psi)
    value = 1e6;
  const auto result = select(toy.grid, toy.estimates, toy.pairs, toy.psi,
                             2.0);
  for (const auto& row : result.table)
    CHECK(row.r_hat == 0.0);
  CHECK(result.chosen == toy.grid.members.front()); // largest V_h
}

TEST_CASE("selector invariants hold on 50 random instances")
{
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto toy = random_instance(seed, 0.05 + 0.002 * seed);
    const auto result = select(toy.grid, toy.estimates, toy.pairs, toy.psi,
                               2.0);
    const auto oracle = brute_force(toy, 2.0);

    double min_criterion = result.table.front().criterion;
    bool chosen_in_grid = false;
    int chosen_count = 0;
    for (std::size_t i = 0; i < result.table.size(); ++i) {
      const auto& row = result.table[i];
      CHECK(row.r_hat >= 0.0);
      CHECK(row.r_hat == doctest::Approx(oracle.r_hat[i]));
      min_criterion = std::min(min_criterion, row.criterion);
      chosen_in_grid |= result.chosen == row.h;
      chosen_count += row.chosen ? 1 : 0;
    }
    CHECK(chosen_in_grid);
    CHECK(chosen_count == 1);
    CHECK(result.slack_used == 0.0);
    CHECK(result.chosen_value == min_criterion);
  }
}

TEST_CASE("missing table entries raise incomplete-family errors")
{
  auto toy = random_instance(3, 0.1);
  toy.pairs.erase(
    make_pair_key(toy.grid.members[0], toy.grid.members[2]));
  CHECK_THROWS_AS(select(toy.grid, toy.estimates, toy.pairs, toy.psi, 2.0),
                  IncompleteFamily);

  auto toy2 = random_instance(3, 0.1);
  toy2.psi.erase(toy2.grid.members[1].h());
  CHECK_THROWS_AS(select(toy2.grid, toy2.estimates, toy2.pairs, toy2.psi,
                         2.0),
                  IncompleteFamily);

  const bandwidths::DyadicGrid empty{ 1, 100, bandwidths::GridMode::full,
                                      {} };
  CHECK_THROWS_AS(select(empty, toy.estimates, toy.pairs, toy.psi, 2.0),
                  EmptyGrid);
}

namespace {

models::DatasetPair standard_data(Eigen::Index n, std::uint64_t seed,
                                  double alpha = 0.0)
{
  const auto f =
    models::DensitySpec::gaussian_mixture({ { 1.0, { 0.0 }, { 1.0 } } });
  const auto g = models::NoiseSpec::laplace(1, 1.0);
  return models::sample_contaminated(f, g, models::ContaminationSpec(alpha),
                                     n, seed);
}

} // namespace

TEST_CASE("density pipeline output is a near-probability density")
{
  const auto data = standard_data(400, 5);
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 2);
  const auto grid = bandwidths::build_grid(200, 1, bandwidths::GridMode::full);
  const auto cfg = upper_functions::UpperFunctionConfig::for_kernel(K, 2.0,
                                                                    0.2);
  const auto eval = UniformGrid::centered(1, 8.0, 1025);
  const auto result = plugin_pipeline(data, ProblemSpec::density(), K, grid,
                                      cfg, eval);
  CHECK(result.final_estimate.estimate.integral() ==
        doctest::Approx(1.0).epsilon(1e-3));
  bool in_grid = false;
  for (const auto& h : grid.members)
    in_grid |= h == result.selection.chosen;
  CHECK(in_grid);
}

TEST_CASE("deconvolution at alpha = 0 equals the density pipeline")
{
  const auto data = standard_data(400, 5);
  const auto K = kernels::ProductKernel::band_limited(1);
  const auto grid = bandwidths::build_grid(200, 1, bandwidths::GridMode::full);
  const auto cfg = upper_functions::UpperFunctionConfig::for_kernel(K, 2.0,
                                                                    0.2);
  const auto eval = UniformGrid::centered(1, 8.0, 1025);
  const auto dens = plugin_pipeline(data, ProblemSpec::density(), K, grid,
                                    cfg, eval);
  const auto dec = plugin_pipeline(
    data,
    ProblemSpec::deconvolution(models::NoiseSpec::laplace(1, 1.0), 0.0), K,
    grid, cfg, eval);
  CHECK(dec.selection.chosen == dens.selection.chosen);
  CHECK((dec.final_estimate.estimate.values -
         dens.final_estimate.estimate.values)
          .abs()
          .maxCoeff() < 1e-6);
}

TEST_CASE("zeroth derivative problem equals the density pipeline")
{
  const auto data = standard_data(400, 6);
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 2);
  const auto grid = bandwidths::build_grid(200, 1, bandwidths::GridMode::full);
  const auto cfg = upper_functions::UpperFunctionConfig::for_kernel(K, 2.0,
                                                                    0.2);
  const auto eval = UniformGrid::centered(1, 8.0, 1025);
  const auto dens = plugin_pipeline(data, ProblemSpec::density(), K, grid,
                                    cfg, eval);
  const auto deriv = plugin_pipeline(data, ProblemSpec::derivative({ 0 }), K,
                                     grid, cfg, eval);
  CHECK(deriv.selection.chosen == dens.selection.chosen);
  CHECK((deriv.final_estimate.estimate.values -
         dens.final_estimate.estimate.values)
          .abs()
          .maxCoeff() < 1e-13);
}

TEST_CASE("split-sample hygiene")
{
  const auto data = standard_data(400, 9);
  const auto K = kernels::ProductKernel::order_s(
    1, kernels::BaseDensity::gaussian, 2);
  const auto grid = bandwidths::build_grid(200, 1, bandwidths::GridMode::full);
  const auto cfg = upper_functions::UpperFunctionConfig::for_kernel(K, 2.0,
                                                                    0.2);
  const auto eval = UniformGrid::centered(1, 8.0, 1025);

  SUBCASE("the selection only reads the first half")
  {
    auto permuted = data;
    std::reverse(permuted.second_half.data.begin(),
                 permuted.second_half.data.end());
    const auto a = plugin_pipeline(data, ProblemSpec::density(), K, grid, cfg,
                                   eval);
    const auto b = plugin_pipeline(permuted, ProblemSpec::density(), K, grid,
                                   cfg, eval);
    CHECK(a.selection.chosen == b.selection.chosen);
    REQUIRE(a.selection.table.size() == b.selection.table.size());
    for (std::size_t i = 0; i < a.selection.table.size(); ++i) {
      CHECK(a.selection.table[i].r_hat == b.selection.table[i].r_hat);
      CHECK(a.selection.table[i].criterion ==
            b.selection.table[i].criterion);
    }
  }

  SUBCASE("the fixed-bandwidth second stage only reads the second half")
  {
    auto permuted = data;
    std::reverse(permuted.first_half.data.begin(),
                 permuted.first_half.data.end());
    const auto h = grid.members.front();
    const auto a = second_stage_estimate(data, ProblemSpec::density(), K, h,
                                         eval);
    const auto b = second_stage_estimate(permuted, ProblemSpec::density(), K,
                                         h, eval);
    CHECK((a.estimate.values == b.estimate.values).all());
  }
}

TEST_CASE("selector result round-trips to CSV")
{
  const auto toy = random_instance(21, 0.1);
  const auto result = select(toy.grid, toy.estimates, toy.pairs, toy.psi,
                             2.0);
  std::ostringstream os;
  write_csv(os, result, "toy");
  const std::string text = os.str();
  CHECK(text.find("# toy") == 0);
  CHECK(text.find("h_1,V_h,R_hat,Psi,criterion,chosen") != std::string::npos);
}

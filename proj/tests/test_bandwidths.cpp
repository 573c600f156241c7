#include "adaptkde/bandwidths.hpp"

#include <doctest.h>

#include <cmath>

using namespace adaptkde;
using namespace adaptkde::bandwidths;

TEST_CASE("volume window endpoints")
{
  const auto [lo, hi] = volume_window(100);
  CHECK(lo == doctest::Approx(std::log(100.0) / 100.0).epsilon(1e-15));
  CHECK(hi ==
        doctest::Approx(std::exp(-std::sqrt(std::log(100.0))))
          .epsilon(1e-15));
  CHECK(lo < hi);
}

TEST_CASE("m = 100 in one dimension gives the single candidate 2^-4")
{
  const auto grid = build_grid(100, 1, GridMode::full);
  REQUIRE(grid.size() == 1);
  CHECK(grid.members[0][0] == 0.0625);
}

TEST_CASE("m = 10000 in one dimension gives exponents 5 through 10")
{
  const auto grid = build_grid(10000, 1, GridMode::full);
  REQUIRE(grid.size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(grid.members[i][0] == std::ldexp(1.0, -(5 + i)));
}

TEST_CASE("every member volume lies inside the window, sorted decreasing")
{
  for (const Eigen::Index m : { 128, 1024, 32768 }) {
    for (const int d : { 1, 2 }) {
      const auto grid = build_grid(m, d, GridMode::full);
      const auto [lo, hi] = volume_window(m);
      REQUIRE(grid.size() >= 1);
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double v = grid.members[i].volume();
        CHECK(v >= lo);
        CHECK(v <= hi);
        if (i > 0)
          CHECK(v <= grid.members[i - 1].volume());
      }
    }
  }
}

TEST_CASE("isotropic mode only keeps equal-component bandwidths")
{
  const auto grid = build_grid(10000, 2, GridMode::isotropic);
  REQUIRE(grid.size() == 3);
  for (const auto& h : grid.members)
    CHECK(h[0] == h[1]);

  const auto full = build_grid(10000, 2, GridMode::full);
  CHECK(full.size() > grid.size());
}

TEST_CASE("degenerate sample sizes are rejected")
{
  CHECK_THROWS_AS(build_grid(2, 1, GridMode::full), InvalidParameter);
  // window is empty for very small m ...
  CHECK_THROWS_AS(build_grid(3, 1, GridMode::full), EmptyGrid);
  // ... and m = 15 has a nonempty window containing no dyadic volume
  CHECK_THROWS_AS(build_grid(15, 1, GridMode::full), EmptyGrid);
}

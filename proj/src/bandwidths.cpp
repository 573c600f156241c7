#include "adaptkde/bandwidths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adaptkde::bandwidths {

std::pair<double, double> volume_window(Eigen::Index m)
{
  const double lm = std::log(static_cast<double>(m));
  return { lm / static_cast<double>(m), std::exp(-std::sqrt(lm)) };
}

namespace {

void enumerate(int dim, int axis, int budget_lo, int budget_hi,
               std::vector<int>& exponents, std::vector<std::vector<int>>& out)
{
  if (axis == dim - 1) {
    for (int k = std::max(0, budget_lo); k <= budget_hi; ++k) {
      exponents[axis] = k;
      out.push_back(exponents);
    }
    return;
  }
  for (int k = 0; k <= budget_hi; ++k) {
    exponents[axis] = k;
    enumerate(dim, axis + 1, budget_lo - k, budget_hi - k, exponents, out);
  }
}

} // namespace

DyadicGrid build_grid(Eigen::Index m, int dim, GridMode mode)
{
  if (m < 3)
    throw InvalidParameter("build_grid: m must be >= 3");
  if (dim < 1)
    throw InvalidParameter("build_grid: dim must be >= 1");

  const auto [vol_lo, vol_hi] = volume_window(m);
  // total exponent K gives V_h = 2^{-K}; the window translates to
  // ceil(-log2 vol_hi) <= K <= floor(-log2 vol_lo), with exact re-check below
  const int k_lo = static_cast<int>(std::ceil(-std::log2(vol_hi) - 1e-12));
  const int k_hi = static_cast<int>(std::floor(-std::log2(vol_lo) + 1e-12));

  std::vector<std::vector<int>> exps;
  if (mode == GridMode::isotropic) {
    std::vector<int> e(dim);
    for (int k = 0;; ++k) {
      if (static_cast<long long>(k) * dim > k_hi)
        break;
      if (static_cast<long long>(k) * dim < k_lo)
        continue;
      std::fill(e.begin(), e.end(), k);
      exps.push_back(e);
    }
  } else {
    std::vector<int> e(dim);
    enumerate(dim, 0, k_lo, k_hi, e, exps);
  }

  DyadicGrid grid{ dim, m, mode, {} };
  for (const auto& e : exps) {
    auto h = kernels::BandwidthVec::dyadic(e);
    if (h.volume() >= vol_lo && h.volume() <= vol_hi)
      grid.members.push_back(std::move(h));
  }
  if (grid.members.empty()) {
    std::ostringstream msg;
    msg << "build_grid: empty dyadic window [" << vol_lo << ", " << vol_hi
        << "] for m=" << m << ", d=" << dim;
    throw EmptyGrid(msg.str());
  }

  std::sort(grid.members.begin(), grid.members.end(),
            [](const kernels::BandwidthVec& a, const kernels::BandwidthVec& b) {
              if (a.volume() != b.volume())
                return a.volume() > b.volume();
              // exponent-vector lexicographic order = descending h
              return a.h() > b.h();
            });
  return grid;
}

} // namespace adaptkde::bandwidths

#pragma once

#include "kernels.hpp"

#include <vector>

namespace adaptkde::bandwidths {

enum class GridMode
{
  full,
  isotropic
};

//! The finite dyadic candidate set: all h with components 2^{-k} whose
//! volume V_h lies in [ln(m)/m, exp(-sqrt(ln m))], sorted by decreasing
//! volume (ties broken lexicographically by exponent vector).
struct DyadicGrid
{
  int dim;
  Eigen::Index m;
  GridMode mode;
  std::vector<kernels::BandwidthVec> members;

  Eigen::Index size() const
  {
    return static_cast<Eigen::Index>(members.size());
  }
};

DyadicGrid build_grid(Eigen::Index m, int dim, GridMode mode);

//! Window [ln(m)/m, exp(-sqrt(ln m))] for the bandwidth volume.
std::pair<double, double> volume_window(Eigen::Index m);

} // namespace adaptkde::bandwidths

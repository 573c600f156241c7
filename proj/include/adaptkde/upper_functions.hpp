#pragma once

#include "grid.hpp"
#include "kernels.hpp"

namespace adaptkde::upper_functions {

//! Loss exponent, majorant scaling and cached kernel norms.
struct UpperFunctionConfig
{
  double p = 2.0;       //!< loss exponent, >= 1
  double c_scale = 1.0; //!< multiplier applied to the majorant constants
  //! Multiplier on the lower constant giving the diagnostic upper envelope
  //! for p > 2 (never used in selection).
  double d_upper_mult = 4.0;

  double norm1 = 0.0; //!< ||K||_1
  double norm2 = 0.0; //!< ||K||_2
  double normp = 0.0; //!< ||K||_p

  //! Populate the cached kernel norms for the given kernel and loss.
  static UpperFunctionConfig for_kernel(const kernels::ProductKernel& K,
                                        double p, double c_scale = 1.0);
};

//! The majorant Delta_m(h), scaled by c_scale.  Three regimes:
//!   p in [1,2): 128 ||K||_1 ||K||_p (m V_h)^{1/p - 1}
//!   p = 2:      9 ||K||_1 ||K||_2 (m V_h)^{-1/2}
//!   p > 2:      (480 p ||K||_1 / ln p) { m^{-1/2} (int [(1/m) sum
//!               K_h^2(T_i - t)]^{p/2} dt)^{1/p} + 2 ||K||_p (m V_h)^{-1/2} }
//! For p <= 2 the value is deterministic; for p > 2 the empirical integral
//! is computed on `grid` from the supplied sample half.
double delta_m(const Sample& sample_half, const kernels::ProductKernel& K,
               const kernels::BandwidthVec& h, const UniformGrid& grid,
               const UpperFunctionConfig& cfg);

struct PsiBounds
{
  double lower = 0.0;
  double upper_form = 0.0;
};

//! Non-random envelope C (m V_h)^{1/min(p,2) - 1} with the branch constants
//! (128||K||_1||K||_p for p<2, 9||K||_1||K||_2 for p=2, 960p||K||_1||K||_p
//! / ln p as lower and d_upper_mult times that as upper for p>2), scaled by
//! c_scale.  Lower == upper for p <= 2.
PsiBounds psi_bounds(Eigen::Index m, const kernels::BandwidthVec& h,
                     const UpperFunctionConfig& cfg);

} // namespace adaptkde::upper_functions

#include "adaptkde/upper_functions.hpp"

#include "adaptkde/estimators.hpp"
#include "adaptkde/numerics.hpp"

#include <cmath>

namespace adaptkde::upper_functions {

UpperFunctionConfig UpperFunctionConfig::for_kernel(
  const kernels::ProductKernel& K, double p, double c_scale)
{
  if (p < 1.0)
    throw InvalidParameter("UpperFunctionConfig: p must be >= 1");
  if (c_scale <= 0.0)
    throw InvalidParameter("UpperFunctionConfig: c_scale must be positive");
  UpperFunctionConfig cfg;
  cfg.p = p;
  cfg.c_scale = c_scale;
  cfg.norm1 = K.norm(1.0);
  cfg.norm2 = K.norm(2.0);
  cfg.normp = K.norm(p);
  return cfg;
}

double delta_m(const Sample& sample_half, const kernels::ProductKernel& K,
               const kernels::BandwidthVec& h, const UniformGrid& grid,
               const UpperFunctionConfig& cfg)
{
  const auto m = sample_half.size();
  if (m < 2)
    throw InvalidParameter("delta_m: sample half must have at least 2 points");
  const double mv = static_cast<double>(m) * h.volume();
  const double p = cfg.p;

  double value;
  if (p < 2.0) {
    value = 128.0 * cfg.norm1 * cfg.normp * std::pow(mv, 1.0 / p - 1.0);
  } else if (p == 2.0) {
    // same expression as psi_bounds so the two agree bit-for-bit
    value = 9.0 * cfg.norm1 * cfg.norm2 * std::pow(mv, -0.5);
  } else {
    // empirical term: (1/m) sum K_h^2(T_i - t) on the grid, then L_{p/2}
    auto K2 = kernels::kernel_on_grid(K, h, grid.spacing(),
                                      grid.upper()[0] - grid.lower()[0]);
    K2.values = K2.values.square();
    auto w = estimators::linear_binned_measure(sample_half, grid);
    auto S = numerics::restrict_to(numerics::convolve(w, K2), grid);
    const double integral =
      S.values.abs().pow(p / 2.0).sum() * grid.cell_volume();
    const double empirical =
      std::pow(integral, 1.0 / p) / std::sqrt(static_cast<double>(m));
    value = (480.0 * p * cfg.norm1 / std::log(p)) *
            (empirical + 2.0 * cfg.normp / std::sqrt(mv));
  }
  return cfg.c_scale * value;
}

PsiBounds psi_bounds(Eigen::Index m, const kernels::BandwidthVec& h,
                     const UpperFunctionConfig& cfg)
{
  const double p = cfg.p;
  const double mv = static_cast<double>(m) * h.volume();
  const double envelope = std::pow(mv, 1.0 / std::min(p, 2.0) - 1.0);
  PsiBounds out;
  if (p < 2.0) {
    out.lower = 128.0 * cfg.norm1 * cfg.normp * envelope;
    out.upper_form = out.lower;
  } else if (p == 2.0) {
    out.lower = 9.0 * cfg.norm1 * cfg.norm2 * envelope;
    out.upper_form = out.lower;
  } else {
    out.lower = 960.0 * p * cfg.norm1 * cfg.normp / std::log(p) * envelope;
    out.upper_form = cfg.d_upper_mult * out.lower;
  }
  out.lower *= cfg.c_scale;
  out.upper_form *= cfg.c_scale;
  return out;
}

} // namespace adaptkde::upper_functions

#pragma once

#include "kernels.hpp"
#include "models.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace adaptkde::estimators {

enum class EvalMethod
{
  direct,
  binned_fft
};

enum class FamilyTag
{
  A,
  APair,
  BDeconv,
  BDeriv
};

enum class HalfTag
{
  first,
  second
};

struct EstimateRecord
{
  kernels::BandwidthVec bandwidth;
  GriddedFunction estimate;
  FamilyTag family;
  HalfTag half;
  EvalMethod method;
};

//! Linear binning of a sample onto the grid: each observation splits its
//! mass between the two nearest nodes per axis; the result integrates to
//! (in-box fraction of the sample). Observations outside the box are dropped.
GriddedFunction linear_binned_measure(const Sample& sample,
                                      const UniformGrid& grid);

//! Standard kernel density estimator x -> (1/m) sum K_h(T_i - x) on the grid.
EstimateRecord kde(const Sample& sample, const kernels::ProductKernel& K,
                   const kernels::BandwidthVec& h, const UniformGrid& grid,
                   EvalMethod method, HalfTag half = HalfTag::first);

//! Pairwise estimator with kernel K_h * K_eta; symmetric in (h, eta).
EstimateRecord kde_pair(const Sample& sample, const kernels::ProductKernel& K,
                        const kernels::BandwidthVec& h,
                        const kernels::BandwidthVec& eta,
                        const UniformGrid& grid, EvalMethod method,
                        HalfTag half = HalfTag::first);

//! Deconvolution kernel M(., h): the inverse Fourier transform of
//! K_check(t h) / ((1-alpha) + alpha g_check(-t)), sampled on `grid`.
GriddedFunction deconv_kernel(const kernels::ProductKernel& K,
                              const kernels::BandwidthVec& h,
                              const models::NoiseSpec& g, double alpha,
                              const UniformGrid& grid);

//! x -> (1/m) sum M(Z_i - x) with M precomputed on a symmetric grid.
EstimateRecord deconv_estimate(const Sample& second_half,
                               const GriddedFunction& M,
                               const kernels::BandwidthVec& h,
                               const UniformGrid& grid, EvalMethod method);

//! Derivative estimator x -> (1/m) sum (-1)^{|m|} (K_h)^{(m)}(X_i - x);
//! equal to the m-th partial derivative of the kde on the same points.
EstimateRecord derivative_estimate(const Sample& second_half,
                                   const kernels::ProductKernel& K,
                                   const kernels::BandwidthVec& h,
                                   const std::vector<int>& m,
                                   const UniformGrid& grid, EvalMethod method);

//! || K_h * f - f ||_p, the bias functional for oracle diagnostics.
double bias_profile(const GriddedFunction& f_true,
                    const kernels::ProductKernel& K,
                    const kernels::BandwidthVec& h, double p);

//! Cache of deconvolution kernels keyed by (h, alpha); one instance per
//! (noise law, grid). Concurrent reads, exclusive insertion.
class DeconvKernelCache
{
public:
  std::shared_ptr<const GriddedFunction> get_or_build(
    const kernels::ProductKernel& K, const kernels::BandwidthVec& h,
    const models::NoiseSpec& g, double alpha, const UniformGrid& grid);

private:
  std::map<std::string, std::shared_ptr<const GriddedFunction>> cache_;
  std::mutex mutex_;
};

} // namespace adaptkde::estimators

#pragma once

#include "bandwidths.hpp"
#include "estimators.hpp"
#include "models.hpp"
#include "upper_functions.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace adaptkde::selector {

//! Map keys are bandwidth component vectors; pair keys are in canonical
//! (larger first component first) order, matching pair_kernel.
using EstimateMap = std::map<std::vector<double>, GriddedFunction>;
using PairKey = std::pair<std::vector<double>, std::vector<double>>;
using PairMap = std::map<PairKey, GriddedFunction>;
using PsiMap = std::map<std::vector<double>, double>;

PairKey make_pair_key(const kernels::BandwidthVec& h,
                      const kernels::BandwidthVec& eta);

struct CriterionRow
{
  kernels::BandwidthVec h;
  double r_hat = 0.0;
  double psi = 0.0;
  double criterion = 0.0; //!< r_hat + 2 psi
  bool chosen = false;
};

struct SelectorResult
{
  kernels::BandwidthVec chosen;
  std::vector<CriterionRow> table;
  double chosen_value = 0.0;
  double slack_used = 0.0; //!< always 0: the finite-grid minimum is exact
  bool tie_break_applied = false;
};

//! R_hat(h) = max over eta in the grid of
//! [ || A_{h,eta} - A_eta ||_p - 2 Psi(eta) ]_+ .
double r_hat(const kernels::BandwidthVec& h, const bandwidths::DyadicGrid& grid,
             const EstimateMap& estimates, const PairMap& pair_estimates,
             const PsiMap& psi, double p);

//! Minimize R_hat(h) + 2 Psi(h) over the grid; exact ties resolved in
//! favor of the largest V_h.
SelectorResult select(const bandwidths::DyadicGrid& grid,
                      const EstimateMap& estimates,
                      const PairMap& pair_estimates, const PsiMap& psi,
                      double p);

//! CSV export: columns h_1..h_d, V_h, R_hat, Psi, criterion, chosen(0/1).
void write_csv(std::ostream& os, const SelectorResult& result,
               const std::string& extra_header = "");

//! Target of the second-stage estimate.
struct ProblemSpec
{
  enum class Kind
  {
    density,
    deconvolution,
    derivative
  };

  Kind kind = Kind::density;
  std::optional<models::NoiseSpec> noise; //!< deconvolution
  double alpha = 0.0;                     //!< deconvolution
  std::vector<int> m;                     //!< derivative multi-index

  static ProblemSpec density();
  static ProblemSpec deconvolution(models::NoiseSpec g, double alpha);
  static ProblemSpec derivative(std::vector<int> m);
};

struct PipelineResult
{
  SelectorResult selection;
  estimators::EstimateRecord final_estimate;
};

//! Split-sample plug-in pipeline: the candidate estimates, the pairwise
//! estimates and the majorant all come from the first half; the selected
//! bandwidth is then used on the second half to build the final estimate
//! (kde, deconvolution estimate, or derivative estimate).
PipelineResult plugin_pipeline(
  const models::DatasetPair& data, const ProblemSpec& problem,
  const kernels::ProductKernel& K, const bandwidths::DyadicGrid& grid,
  const upper_functions::UpperFunctionConfig& cfg,
  const UniformGrid& eval_grid,
  estimators::EvalMethod method = estimators::EvalMethod::binned_fft,
  estimators::DeconvKernelCache* cache = nullptr);

//! Fixed-bandwidth variant of the pipeline's second stage (used by the
//! benchmark to compute per-candidate risks on the same data).
estimators::EstimateRecord second_stage_estimate(
  const models::DatasetPair& data, const ProblemSpec& problem,
  const kernels::ProductKernel& K, const kernels::BandwidthVec& h,
  const UniformGrid& eval_grid,
  estimators::EvalMethod method = estimators::EvalMethod::binned_fft,
  estimators::DeconvKernelCache* cache = nullptr);

} // namespace adaptkde::selector

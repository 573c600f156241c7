#pragma once

#include "selector.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace adaptkde::bench {

//! Monte Carlo experiment shape: loss/risk exponents, replication count,
//! sample-size ladder and master seed.
struct RiskConfig
{
  double p = 2.0;
  double q = 2.0;
  int replications = 100;
  std::vector<Eigen::Index> sizes;
  std::uint64_t seed = 0;

  void validate() const;
};

//! One experiment: data-generating model, problem, kernel and selector knobs.
struct ExperimentSpec
{
  models::DensitySpec density;
  std::optional<models::NoiseSpec> noise; //!< data contamination law
  double alpha = 0.0;                     //!< contamination level of the data
  selector::ProblemSpec problem;
  kernels::ProductKernel kernel;
  bandwidths::GridMode grid_mode = bandwidths::GridMode::full;
  double c_scale = 1.0;
  UniformGrid eval_grid;
  estimators::EvalMethod method = estimators::EvalMethod::binned_fft;
  //! If set, skip selection and use this bandwidth for every replication
  //! (fixed-bandwidth baselines and risk-monotonicity diagnostics).
  std::optional<kernels::BandwidthVec> fixed_h;
};

struct RiskRow
{
  Eigen::Index n = 0;
  std::string method; //!< "selected" or "fixed_h=<value>"
  double risk = 0.0;
  double mc_stderr = 0.0;
  std::vector<double> per_replication;
};

struct RiskReport
{
  RiskConfig config;
  std::vector<RiskRow> rows;
  double theoretical_exponent = 0.0;
  std::string rate_source;
};

//! CSV export: columns n, method, risk, mc_stderr.
void write_csv(std::ostream& os, const RiskReport& report,
               const std::string& extra_header = "");

//! Runs cfg.replications independent replications per sample size with
//! derived seeds, computes ||estimate - target||_p per replication and
//! aggregates to (mean of q-th powers)^{1/q} with a delta-method standard
//! error.  Deterministic given (seed, cfg) regardless of `jobs`.
RiskReport mc_risk(const RiskConfig& cfg, const ExperimentSpec& spec,
                   const GriddedFunction& target, int jobs = 1);

struct OracleRow
{
  Eigen::Index n = 0;
  double median_ratio = 0.0;
  double q90_ratio = 0.0;
  std::vector<double> ratios;
};

//! Per replication, the risk of the selected estimator divided by the best
//! fixed-bandwidth risk over the same realized data; the selected bandwidth
//! is a grid member, so every ratio is >= 1.
std::vector<OracleRow> oracle_ratio(const RiskConfig& cfg,
                                    const ExperimentSpec& spec,
                                    const GriddedFunction& target,
                                    int jobs = 1);

enum class RateProblem
{
  density,         //!< Nikolskii scale, direct observations
  derivative,      //!< plug-in derivative estimation
  sobolev_deconv_A, //!< Sobolev scale, noise density target
  sobolev_deconv_B  //!< Sobolev scale, deconvolution target
};

struct RatePair
{
  double L_exponent = 0.0;
  double n_exponent = 0.0;
  std::string source;
};

//! Closed-form adaptive rate exponents.  `beta` holds the per-axis
//! smoothness indices (Nikolskii problems) or {beta_1, mu_1} (Sobolev
//! deconvolution); `m` is the derivative multi-index (empty otherwise).
RatePair theoretical_rate(RateProblem problem, const std::vector<double>& beta,
                          const std::vector<int>& m, double p);

struct RateFit
{
  double slope = 0.0;
  double stderr_ = 0.0;
  double theoretical = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

//! Least-squares slope of log risk vs log n over the "selected" rows.
//! Requires >= 3 sizes spanning at least a factor 16.
RateFit rate_fit(const RiskReport& report, double tolerance = 0.08);

//! Smoothness-class membership parameters.
struct SmoothnessSpec
{
  enum class Kind
  {
    nikolskii,
    sobolev
  };

  Kind kind = Kind::nikolskii;
  std::vector<double> beta;
  double L = 1.0;
  double p = 2.0;     //!< nikolskii only
  std::vector<int> k; //!< nikolskii difference orders, k_j > beta_j
  double beta1 = 1.0; //!< sobolev only

  static SmoothnessSpec nikolskii(std::vector<double> beta, double L, double p,
                                  std::vector<int> k);
  static SmoothnessSpec sobolev(double beta1, double L);
};

struct NikolskiiResult
{
  double max_ratio = 0.0;
  double norm_value = 0.0;
  bool passes = false;
};

//! max over axes j and grid-commensurate steps u of
//! || Delta^{k_j}_{u,j} f ||_p / |u|^{beta_j}, plus the norm check
//! ||f||_p <= L; passes iff both are <= L.
NikolskiiResult nikolskii_check(const GriddedFunction& f,
                                const SmoothnessSpec& spec);

struct SobolevResult
{
  double integral_value = 0.0;
  bool passes = false;
};

//! Weighted Fourier integral (2 pi)^{-1} int (1+t^2)^{beta_1} |f_check|^2 dt
//! by discrete transform, compared to L^2.  d = 1 only.
SobolevResult sobolev_check(const GriddedFunction& f, double beta1, double L);

struct KolmogorovResult
{
  double lhs = 0.0;                  //!< ||f^{(m)}||_p
  double rhs_without_constant = 0.0; //!< L^{1/omega} ||f||_p^{1 - 1/omega}
  double ratio = 0.0;
};

//! The embedding ||f^{(m)}||_p <= c L^{1/omega} ||f||_p^{1-1/omega} with
//! 1/omega = sum_j m_j / beta_j; reports the implied constant.
KolmogorovResult kolmogorov_check(const models::DensitySpec& f,
                                  const std::vector<int>& m,
                                  const SmoothnessSpec& spec, double p,
                                  const UniformGrid& grid);

} // namespace adaptkde::bench

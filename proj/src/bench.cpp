#include "adaptkde/bench.hpp"

#include "adaptkde/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace adaptkde::bench {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

//! Run fn(r) for r in [0, count) on up to `jobs` threads; results are
//! written by index so the reduction is deterministic.  The first failure
//! aborts with the replication index attached.
void run_parallel(int count, int jobs,
                  const std::function<void(int)>& fn)
{
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int r = 0; r < count; ++r)
      fn(r);
    return;
  }
  std::atomic<int> next{ 0 };
  std::mutex error_mutex;
  std::string first_error;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= count)
          return;
        try {
          fn(r);
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mutex);
          if (first_error.empty())
            first_error = "replication " + std::to_string(r) +
                          " failed: " + e.what();
        }
      }
    });
  }
  for (auto& w : workers)
    w.join();
  if (!first_error.empty())
    throw std::runtime_error(first_error);
}

double quantile(std::vector<double> values, double q)
{
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size())
    return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

models::NoiseSpec data_noise(const ExperimentSpec& spec)
{
  // alpha = 0 never draws from the noise stream; any placeholder law works
  return spec.noise ? *spec.noise
                    : models::NoiseSpec::gaussian(spec.density.dim(), 1.0);
}

double replication_risk(const RiskConfig& cfg, const ExperimentSpec& spec,
                        const GriddedFunction& target,
                        const bandwidths::DyadicGrid& grid,
                        const upper_functions::UpperFunctionConfig& ucfg,
                        const models::NoiseSpec& noise, Eigen::Index n,
                        std::uint64_t replication,
                        estimators::DeconvKernelCache& cache)
{
  const auto data = models::sample_contaminated(
    spec.density, noise, models::ContaminationSpec(spec.alpha), n, cfg.seed,
    replication);
  GriddedFunction estimate =
    spec.fixed_h
      ? selector::second_stage_estimate(data, spec.problem, spec.kernel,
                                        *spec.fixed_h, spec.eval_grid,
                                        spec.method, &cache)
          .estimate
      : selector::plugin_pipeline(data, spec.problem, spec.kernel, grid, ucfg,
                                  spec.eval_grid, spec.method, &cache)
          .final_estimate.estimate;
  estimate.values -= target.values;
  return numerics::lp_norm(estimate, cfg.p);
}

RiskRow aggregate_row(Eigen::Index n, std::string method,
                      std::vector<double> risks, double q)
{
  RiskRow row;
  row.n = n;
  row.method = std::move(method);
  const auto R = static_cast<double>(risks.size());
  double mean_q = 0.0;
  for (double r : risks)
    mean_q += std::pow(r, q);
  mean_q /= R;
  double var_q = 0.0;
  for (double r : risks)
    var_q += std::pow(std::pow(r, q) - mean_q, 2);
  var_q /= R - 1.0;
  row.risk = std::pow(mean_q, 1.0 / q);
  // delta method on the mean of q-th powers
  row.mc_stderr = mean_q > 0.0
                    ? std::sqrt(var_q / R) / q * std::pow(mean_q, 1.0 / q - 1.0)
                    : 0.0;
  row.per_replication = std::move(risks);
  return row;
}

} // namespace

void RiskConfig::validate() const
{
  if (p < 1.0 || q < 1.0)
    throw InvalidParameter("RiskConfig: p and q must be >= 1");
  if (replications < 2)
    throw InvalidParameter("RiskConfig: at least 2 replications required");
  if (sizes.empty())
    throw InvalidParameter("RiskConfig: no sample sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw InvalidParameter("RiskConfig: sizes must be strictly increasing");
}

void write_csv(std::ostream& os, const RiskReport& report,
               const std::string& extra_header)
{
  if (!extra_header.empty())
    os << "# " << extra_header << "\n";
  os << "n,method,risk,mc_stderr\n";
  os.precision(17);
  for (const auto& row : report.rows)
    os << row.n << "," << row.method << "," << row.risk << ","
       << row.mc_stderr << "\n";
}

RiskReport mc_risk(const RiskConfig& cfg, const ExperimentSpec& spec,
                   const GriddedFunction& target, int jobs)
{
  cfg.validate();
  const auto noise = data_noise(spec);
  const auto ucfg = upper_functions::UpperFunctionConfig::for_kernel(
    spec.kernel, cfg.p, spec.c_scale);
  estimators::DeconvKernelCache cache;

  RiskReport report;
  report.config = cfg;
  const int R = cfg.replications;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    const Eigen::Index n = cfg.sizes[i];
    const auto grid =
      bandwidths::build_grid(n / 2, spec.density.dim(), spec.grid_mode);
    std::vector<double> risks(R);
    run_parallel(R, jobs, [&](int r) {
      const auto rep = static_cast<std::uint64_t>(i) *
                         static_cast<std::uint64_t>(R) +
                       static_cast<std::uint64_t>(r);
      risks[r] =
        replication_risk(cfg, spec, target, grid, ucfg, noise, n, rep, cache);
    });
    report.rows.push_back(aggregate_row(
      n, spec.fixed_h ? "fixed_h" : "selected", std::move(risks), cfg.q));
  }
  return report;
}

std::vector<OracleRow> oracle_ratio(const RiskConfig& cfg,
                                    const ExperimentSpec& spec,
                                    const GriddedFunction& target, int jobs)
{
  cfg.validate();
  const auto noise = data_noise(spec);
  const auto ucfg = upper_functions::UpperFunctionConfig::for_kernel(
    spec.kernel, cfg.p, spec.c_scale);
  estimators::DeconvKernelCache cache;

  std::vector<OracleRow> out;
  const int R = cfg.replications;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    const Eigen::Index n = cfg.sizes[i];
    const auto grid =
      bandwidths::build_grid(n / 2, spec.density.dim(), spec.grid_mode);
    std::vector<double> ratios(R);
    run_parallel(R, jobs, [&](int r) {
      const auto rep = static_cast<std::uint64_t>(i) *
                         static_cast<std::uint64_t>(R) +
                       static_cast<std::uint64_t>(r);
      const auto data = models::sample_contaminated(
        spec.density, noise, models::ContaminationSpec(spec.alpha), n,
        cfg.seed, rep);
      auto result =
        selector::plugin_pipeline(data, spec.problem, spec.kernel, grid, ucfg,
                                  spec.eval_grid, spec.method, &cache);
      GriddedFunction diff(result.final_estimate.estimate.grid,
                           result.final_estimate.estimate.values -
                             target.values);
      const double selected_risk = numerics::lp_norm(diff, cfg.p);
      double best = selected_risk; // the chosen bandwidth is a grid member
      for (const auto& h : grid.members) {
        if (h == result.selection.chosen)
          continue;
        auto fixed =
          selector::second_stage_estimate(data, spec.problem, spec.kernel, h,
                                          spec.eval_grid, spec.method, &cache);
        fixed.estimate.values -= target.values;
        best = std::min(best, numerics::lp_norm(fixed.estimate, cfg.p));
      }
      ratios[r] = best > 0.0 ? selected_risk / best : 1.0;
    });
    OracleRow row;
    row.n = n;
    row.median_ratio = quantile(ratios, 0.5);
    row.q90_ratio = quantile(ratios, 0.9);
    row.ratios = std::move(ratios);
    out.push_back(std::move(row));
  }
  return out;
}

RatePair theoretical_rate(RateProblem problem, const std::vector<double>& beta,
                          const std::vector<int>& m, double p)
{
  if (beta.empty())
    throw InvalidParameter("theoretical_rate: empty smoothness vector");
  for (double b : beta)
    if (b <= 0.0)
      throw InvalidParameter("theoretical_rate: smoothness must be positive");

  RatePair out;
  switch (problem) {
    case RateProblem::density:
    case RateProblem::derivative: {
      const double a = 1.0 - 1.0 / std::min(p, 2.0);
      double inv_beta = 0.0;
      for (double b : beta)
        inv_beta += 1.0 / b;
      const double beta_agg = 1.0 / inv_beta;
      const double l_density = a / (beta_agg + a);
      const double n_density = -a * beta_agg / (beta_agg + a);
      if (problem == RateProblem::density) {
        out.L_exponent = l_density;
        out.n_exponent = n_density;
        out.source = "nikolskii-adaptive";
      } else {
        if (m.size() != beta.size())
          throw InvalidParameter(
            "theoretical_rate: derivative order/smoothness size mismatch");
        double inv_omega = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j)
          inv_omega += static_cast<double>(m[j]) / beta[j];
        if (inv_omega >= 1.0)
          throw OutOfValidity(
            "theoretical_rate: omega <= 1, no uniformly consistent estimator");
        out.L_exponent = inv_omega + (1.0 - inv_omega) * l_density;
        out.n_exponent = (1.0 - inv_omega) * n_density;
        out.source = "derivative-plugin";
      }
      break;
    }
    case RateProblem::sobolev_deconv_A:
    case RateProblem::sobolev_deconv_B: {
      if (beta.size() != 2)
        throw InvalidParameter(
          "theoretical_rate: Sobolev deconvolution needs {beta_1, mu_1}");
      const double b1 = beta[0], mu1 = beta[1];
      const double denom = 2.0 * b1 + 2.0 * mu1 + 1.0;
      if (problem == RateProblem::sobolev_deconv_A) {
        out.L_exponent = 1.0 / denom;
        out.n_exponent = -(b1 + mu1) / denom;
        out.source = "sobolev-deconv-noise-target";
      } else {
        out.L_exponent = (1.0 + 2.0 * mu1) / denom;
        out.n_exponent = -b1 / denom;
        out.source = "sobolev-deconv";
      }
      break;
    }
  }
  return out;
}

RateFit rate_fit(const RiskReport& report, double tolerance)
{
  std::vector<double> x, y;
  for (const auto& row : report.rows) {
    if (row.risk <= 0.0)
      throw InvalidParameter("rate_fit: nonpositive risk cannot be logged");
    x.push_back(std::log(static_cast<double>(row.n)));
    y.push_back(std::log(row.risk));
  }
  if (x.size() < 3)
    throw InvalidParameter("rate_fit: need at least 3 sample sizes");
  const auto [min_it, max_it] = std::minmax_element(x.begin(), x.end());
  if (*max_it - *min_it < std::log(16.0) - 1e-12)
    throw InvalidParameter("rate_fit: sizes must span at least a factor 16");

  const auto k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double resid = y[i] - my - fit.slope * (x[i] - mx);
    rss += resid * resid;
  }
  fit.stderr_ = x.size() > 2 ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
  fit.theoretical = report.theoretical_exponent;
  fit.tolerance = tolerance;
  fit.pass = std::abs(fit.slope - fit.theoretical) <= tolerance;
  return fit;
}

SmoothnessSpec SmoothnessSpec::nikolskii(std::vector<double> beta, double L,
                                         double p, std::vector<int> k)
{
  if (beta.empty() || beta.size() != k.size())
    throw InvalidParameter("SmoothnessSpec: beta/k size mismatch");
  if (L <= 0.0 || p < 1.0)
    throw InvalidParameter("SmoothnessSpec: require L > 0 and p >= 1");
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (beta[j] <= 0.0)
      throw InvalidParameter("SmoothnessSpec: beta must be positive");
    if (static_cast<double>(k[j]) <= beta[j])
      throw InvalidParameter("SmoothnessSpec: need k_j > beta_j");
  }
  SmoothnessSpec spec;
  spec.kind = Kind::nikolskii;
  spec.beta = std::move(beta);
  spec.L = L;
  spec.p = p;
  spec.k = std::move(k);
  return spec;
}

SmoothnessSpec SmoothnessSpec::sobolev(double beta1, double L)
{
  if (beta1 <= 0.0 || L <= 0.0)
    throw InvalidParameter("SmoothnessSpec: require beta_1 > 0 and L > 0");
  SmoothnessSpec spec;
  spec.kind = Kind::sobolev;
  spec.beta1 = beta1;
  spec.L = L;
  return spec;
}

NikolskiiResult nikolskii_check(const GriddedFunction& f,
                                const SmoothnessSpec& spec)
{
  if (spec.kind != SmoothnessSpec::Kind::nikolskii)
    throw InvalidParameter("nikolskii_check: wrong spec kind");
  const int d = f.grid.dim();
  if (static_cast<int>(spec.beta.size()) != d)
    throw InvalidParameter("nikolskii_check: dimension mismatch");

  NikolskiiResult result;
  result.norm_value = numerics::lp_norm(f, spec.p);
  for (int j = 0; j < d; ++j) {
    const double width = f.grid.upper()[j] - f.grid.lower()[j];
    for (double u = f.grid.spacing()[j]; u <= width / 4.0; u *= 2.0) {
      for (const double step : { u, -u }) {
        auto diff = numerics::finite_difference(f, step, j, spec.k[j]);
        const double ratio =
          numerics::lp_norm(diff, spec.p) / std::pow(u, spec.beta[j]);
        result.max_ratio = std::max(result.max_ratio, ratio);
      }
    }
  }
  result.passes = result.max_ratio <= spec.L && result.norm_value <= spec.L;
  return result;
}

SobolevResult sobolev_check(const GriddedFunction& f, double beta1, double L)
{
  if (f.grid.dim() != 1)
    throw UnsupportedOperation("sobolev_check: d = 1 only");
  if (beta1 <= 0.0 || L <= 0.0)
    throw InvalidParameter("sobolev_check: require beta_1 > 0 and L > 0");

  const Eigen::Index n = f.grid.total_points();
  const Eigen::Index padded = numerics::next_pow2(8 * n);
  const double dx = f.grid.spacing()[0];
  const double dt = kTwoPi / (static_cast<double>(padded) * dx);

  std::vector<std::complex<double>> data(padded);
  for (Eigen::Index i = 0; i < n; ++i)
    data[i] = f.values[i];
  numerics::fft_nd(data, { padded }, false);

  double integral = 0.0;
  for (Eigen::Index k = 0; k < padded; ++k) {
    const Eigen::Index signed_k = k < padded / 2 ? k : k - padded;
    const double t = static_cast<double>(signed_k) * dt;
    integral += std::pow(1.0 + t * t, beta1) * std::norm(data[k] * dx);
  }
  integral *= dt / kTwoPi;

  SobolevResult result;
  result.integral_value = integral;
  result.passes = integral <= L * L;
  return result;
}

KolmogorovResult kolmogorov_check(const models::DensitySpec& f,
                                  const std::vector<int>& m,
                                  const SmoothnessSpec& spec, double p,
                                  const UniformGrid& grid)
{
  if (spec.kind != SmoothnessSpec::Kind::nikolskii)
    throw InvalidParameter("kolmogorov_check: needs a Nikolskii spec");
  if (static_cast<int>(m.size()) != f.dim() ||
      spec.beta.size() != m.size())
    throw InvalidParameter("kolmogorov_check: dimension mismatch");

  double inv_omega = 0.0;
  int order = 0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    inv_omega += static_cast<double>(m[j]) / spec.beta[j];
    order += m[j];
  }
  if (inv_omega >= 1.0)
    throw OutOfValidity("kolmogorov_check: omega <= 1 is outside validity");
  if (order > 0 && !f.has_exact_derivatives())
    throw UnsupportedOperation(
      "kolmogorov_check: exact derivatives unavailable for this density");

  GriddedFunction deriv(grid);
  for (Eigen::Index i = 0; i < deriv.values.size(); ++i) {
    const auto x = grid.node(i);
    deriv.values[i] =
      order > 0 ? f.derivative(x.data(), m) : f.eval(x.data());
  }
  const double fnorm = numerics::lp_norm(f.on_grid(grid), p);

  KolmogorovResult result;
  result.lhs = numerics::lp_norm(deriv, p);
  result.rhs_without_constant =
    std::pow(spec.L, inv_omega) * std::pow(fnorm, 1.0 - inv_omega);
  result.ratio = result.rhs_without_constant > 0.0
                   ? result.lhs / result.rhs_without_constant
                   : 0.0;
  return result;
}

} // namespace adaptkde::bench

#include "adaptkde/estimators.hpp"

#include "adaptkde/numerics.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace adaptkde::estimators {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

//! Reflect a function on a zero-symmetric grid: u -> f(-u).
GriddedFunction flip(const GriddedFunction& f)
{
  const auto& g = f.grid;
  const int d = g.dim();
  std::vector<double> lower(d), upper(d);
  for (int j = 0; j < d; ++j) {
    lower[j] = -g.upper()[j];
    upper[j] = -g.lower()[j];
  }
  UniformGrid out_grid(lower, upper, g.points_per_dim());
  Eigen::ArrayXd values(f.values.size());
  std::vector<Eigen::Index> mi(d);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mi = out_grid.multi_index(i);
    for (int j = 0; j < d; ++j)
      mi[j] = g.points_per_dim()[j] - 1 - mi[j];
    values[i] = f.values[g.flat_index(mi)];
  }
  return GriddedFunction(std::move(out_grid), std::move(values));
}

double box_width(const UniformGrid& grid)
{
  double w = 0.0;
  for (int j = 0; j < grid.dim(); ++j)
    w = std::max(w, grid.upper()[j] - grid.lower()[j]);
  return w;
}

//! Multilinear interpolation with zero extension outside the box.
double interp(const GriddedFunction& f, const double* x)
{
  const auto& g = f.grid;
  const int d = g.dim();
  double v = 0.0;
  std::vector<Eigen::Index> cell(d);
  std::vector<double> frac(d);
  for (int j = 0; j < d; ++j) {
    const double pos = (x[j] - g.lower()[j]) / g.spacing()[j];
    if (pos < 0.0 || pos > static_cast<double>(g.points_per_dim()[j] - 1))
      return 0.0;
    auto lo = static_cast<Eigen::Index>(pos);
    lo = std::min(lo, g.points_per_dim()[j] - 2);
    cell[j] = lo;
    frac[j] = pos - static_cast<double>(lo);
  }
  std::vector<Eigen::Index> mi(d);
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      const int bit = (corner >> j) & 1;
      mi[j] = cell[j] + bit;
      w *= bit ? frac[j] : 1.0 - frac[j];
    }
    v += w * f.values[g.flat_index(mi)];
  }
  return v;
}

//! (1/m) sum G(x - T_i) on the grid via linear binning + FFT convolution.
GriddedFunction binned_sum(const Sample& sample, const GriddedFunction& G,
                           const UniformGrid& grid)
{
  GriddedFunction w = linear_binned_measure(sample, grid);
  return numerics::restrict_to(numerics::convolve(w, G), grid);
}

//! (1/m) sum G(x - T_i) on the grid by direct summation (G interpolated).
GriddedFunction direct_sum(const Sample& sample, const GriddedFunction& G,
                           const UniformGrid& grid)
{
  const int d = grid.dim();
  const auto m = sample.size();
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(grid.total_points());
  std::vector<double> arg(d);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = grid.node(i);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double* t = sample.point(k);
      for (int j = 0; j < d; ++j)
        arg[j] = x[j] - t[j];
      acc += interp(G, arg.data());
    }
    values[i] = acc / static_cast<double>(m);
  }
  return GriddedFunction(grid, std::move(values));
}

} // namespace

GriddedFunction linear_binned_measure(const Sample& sample,
                                      const UniformGrid& grid)
{
  if (sample.dim != grid.dim())
    throw IncompatibleGrid("linear binning: dimension mismatch");
  const int d = grid.dim();
  const auto m = sample.size();
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(grid.total_points());
  const double point_mass =
    1.0 / (static_cast<double>(m) * grid.cell_volume());

  std::vector<Eigen::Index> cell(d);
  std::vector<double> frac(d);
  std::vector<Eigen::Index> mi(d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double* t = sample.point(i);
    bool inside = true;
    for (int j = 0; j < d; ++j) {
      const double pos = (t[j] - grid.lower()[j]) / grid.spacing()[j];
      if (pos < 0.0 ||
          pos > static_cast<double>(grid.points_per_dim()[j] - 1)) {
        inside = false;
        break;
      }
      auto lo = static_cast<Eigen::Index>(pos);
      lo = std::min(lo, grid.points_per_dim()[j] - 2);
      cell[j] = lo;
      frac[j] = pos - static_cast<double>(lo);
    }
    if (!inside)
      continue;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = point_mass;
      for (int j = 0; j < d; ++j) {
        const int bit = (corner >> j) & 1;
        mi[j] = cell[j] + bit;
        w *= bit ? frac[j] : 1.0 - frac[j];
      }
      values[grid.flat_index(mi)] += w;
    }
  }
  return GriddedFunction(grid, std::move(values));
}

EstimateRecord kde(const Sample& sample, const kernels::ProductKernel& K,
                   const kernels::BandwidthVec& h, const UniformGrid& grid,
                   EvalMethod method, HalfTag half)
{
  if (sample.dim != grid.dim() || K.dim() != grid.dim())
    throw IncompatibleGrid("kde: dimension mismatch");

  GriddedFunction estimate(grid);
  if (method == EvalMethod::binned_fft) {
    auto Kg = kernels::kernel_on_grid(K, h, grid.spacing(), box_width(grid));
    estimate = binned_sum(sample, Kg, grid);
  } else {
    const int d = grid.dim();
    std::vector<double> arg(d);
    for (Eigen::Index i = 0; i < estimate.values.size(); ++i) {
      const auto x = grid.node(i);
      double acc = 0.0;
      for (Eigen::Index k = 0; k < sample.size(); ++k) {
        const double* t = sample.point(k);
        for (int j = 0; j < d; ++j)
          arg[j] = t[j] - x[j];
        acc += kernels::eval_scaled(K, h, arg.data());
      }
      estimate.values[i] = acc / static_cast<double>(sample.size());
    }
  }
  estimate.check_finite("kde");
  return EstimateRecord{ h, std::move(estimate), FamilyTag::A, half, method };
}

EstimateRecord kde_pair(const Sample& sample, const kernels::ProductKernel& K,
                        const kernels::BandwidthVec& h,
                        const kernels::BandwidthVec& eta,
                        const UniformGrid& grid, EvalMethod method,
                        HalfTag half)
{
  auto pairK = kernels::pair_kernel(K, h, eta, grid);
  GriddedFunction estimate =
    method == EvalMethod::binned_fft
      ? binned_sum(sample, pairK, grid)
      : direct_sum(sample, flip(pairK), grid);
  estimate.check_finite("kde_pair");
  return EstimateRecord{ h, std::move(estimate), FamilyTag::APair, half,
                         method };
}

GriddedFunction deconv_kernel(const kernels::ProductKernel& K,
                              const kernels::BandwidthVec& h,
                              const models::NoiseSpec& g, double alpha,
                              const UniformGrid& grid)
{
  const auto report = models::check_assumption1(g, alpha);
  if (!report.satisfied)
    throw IllPosedModel("deconv_kernel: Assumption on the noise law fails "
                        "(denominator vanishes or decay is super-polynomial)");
  const int d = grid.dim();

  // Frequency lattice of the padded grid, >= 8 nodes per unit frequency.
  // The inverse FFT periodizes M, and band-limited kernels only decay
  // polynomially, so in d = 1 the period is stretched until the wrapped
  // tails fall below the quadrature noise floor.
  std::vector<Eigen::Index> pad_n(d);
  std::vector<double> dt(d);
  for (int j = 0; j < d; ++j) {
    const double dx = grid.spacing()[j];
    const double min_period =
      d == 1 ? 2048.0 : 4.0 * (grid.upper()[j] - grid.lower()[j]);
    const auto min_pad = static_cast<Eigen::Index>(
      std::ceil(std::max(8.0 * kTwoPi, min_period) / dx));
    pad_n[j] = numerics::next_pow2(
      std::max(grid.points_per_dim()[j], min_pad));
    dt[j] = kTwoPi / (static_cast<double>(pad_n[j]) * dx);
  }

  Eigen::Index pad_total = 1;
  for (auto n : pad_n)
    pad_total *= n;
  std::vector<std::complex<double>> spectrum(pad_total);
  std::vector<double> t(d);
  std::vector<Eigen::Index> mi(d);
  for (Eigen::Index flat = 0; flat < pad_total; ++flat) {
    Eigen::Index rem = flat;
    for (int j = d; j-- > 0;) {
      mi[j] = rem % pad_n[j];
      rem /= pad_n[j];
    }
    double numer = 1.0;
    std::complex<double> phase = 1.0;
    bool zero = false;
    for (int j = 0; j < d; ++j) {
      const Eigen::Index signed_k =
        mi[j] < pad_n[j] / 2 ? mi[j] : mi[j] - pad_n[j];
      t[j] = static_cast<double>(signed_k) * dt[j];
      const double factor = K.factor(j).fourier(t[j] * h[j]);
      if (factor == 0.0) {
        zero = true;
        break;
      }
      numer *= factor;
      phase *= std::exp(std::complex<double>(0.0, t[j] * grid.lower()[j]));
    }
    if (zero)
      continue;
    const std::complex<double> denom =
      (1.0 - alpha) + alpha * std::conj(g.char_fn(t.data()));
    spectrum[flat] = numer / denom * phase;
  }

  numerics::fft_nd(spectrum, pad_n, true);

  Eigen::ArrayXd values(grid.total_points());
  double scale = 1.0;
  for (int j = 0; j < d; ++j)
    scale /= grid.spacing()[j];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mi = grid.multi_index(i);
    Eigen::Index flat = 0;
    for (int j = 0; j < d; ++j)
      flat = flat * pad_n[j] + mi[j];
    values[i] = spectrum[flat].real() * scale;
  }
  GriddedFunction M(grid, std::move(values));
  M.check_finite("deconv_kernel");
  return M;
}

EstimateRecord deconv_estimate(const Sample& second_half,
                               const GriddedFunction& M,
                               const kernels::BandwidthVec& h,
                               const UniformGrid& grid, EvalMethod method)
{
  GriddedFunction G = flip(M); // estimate(x) = (1/m) sum M(Z_i - x)
  GriddedFunction estimate = method == EvalMethod::binned_fft
                               ? binned_sum(second_half, G, grid)
                               : direct_sum(second_half, G, grid);
  estimate.check_finite("deconv_estimate");
  return EstimateRecord{ h, std::move(estimate), FamilyTag::BDeconv,
                         HalfTag::second, method };
}

EstimateRecord derivative_estimate(const Sample& second_half,
                                   const kernels::ProductKernel& K,
                                   const kernels::BandwidthVec& h,
                                   const std::vector<int>& m,
                                   const UniformGrid& grid, EvalMethod method)
{
  if (!K.has_derivatives())
    throw UnsupportedOperation(
      "derivative_estimate: kernel base has no closed-form derivatives");
  int order = 0;
  for (int mj : m)
    order += mj;
  auto D = kernels::kernel_derivative_on_grid(K, h, m, grid.spacing(),
                                              box_width(grid));
  // estimate(x) = (1/m) sum (-1)^{|m|} (K_h)^{(m)}(X_i - x)
  //            = (1/m) sum G(x - X_i),  G(u) = (-1)^{|m|} (K_h)^{(m)}(-u)
  GriddedFunction G = flip(D);
  if (order % 2)
    G.values = -G.values;
  GriddedFunction estimate = method == EvalMethod::binned_fft
                               ? binned_sum(second_half, G, grid)
                               : direct_sum(second_half, G, grid);
  estimate.check_finite("derivative_estimate");
  return EstimateRecord{ h, std::move(estimate), FamilyTag::BDeriv,
                         HalfTag::second, method };
}

double bias_profile(const GriddedFunction& f_true,
                    const kernels::ProductKernel& K,
                    const kernels::BandwidthVec& h, double p)
{
  auto Kg = kernels::kernel_on_grid(K, h, f_true.grid.spacing(),
                                    box_width(f_true.grid));
  auto smoothed =
    numerics::restrict_to(numerics::convolve(f_true, Kg), f_true.grid);
  GriddedFunction diff(f_true.grid, smoothed.values - f_true.values);
  return numerics::lp_norm(diff, p);
}

std::shared_ptr<const GriddedFunction> DeconvKernelCache::get_or_build(
  const kernels::ProductKernel& K, const kernels::BandwidthVec& h,
  const models::NoiseSpec& g, double alpha, const UniformGrid& grid)
{
  std::ostringstream key;
  key.precision(17);
  for (double hj : h.h())
    key << hj << ",";
  key << alpha << ";" << grid.points_per_dim()[0] << ","
      << grid.lower()[0];
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key.str());
    if (it != cache_.end())
      return it->second;
  }
  auto built = std::make_shared<const GriddedFunction>(
    deconv_kernel(K, h, g, alpha, grid));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(key.str(), std::move(built));
  return it->second;
}

} // namespace adaptkde::estimators

#include "adaptkde/models.hpp"

#include "adaptkde/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace adaptkde::models {

namespace {

constexpr double kPi = 3.14159265358979323846;

double phi(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

double hermite(int r, double y)
{
  double prev = 1.0, cur = y;
  if (r == 0)
    return prev;
  for (int k = 1; k < r; ++k) {
    const double next = y * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

} // namespace

DensitySpec DensitySpec::gaussian_mixture(std::vector<GaussianComponent> comps)
{
  if (comps.empty())
    throw InvalidParameter("gaussian_mixture: no components");
  DensitySpec spec;
  spec.form_ = Form::gaussian_mixture;
  spec.dim_ = static_cast<int>(comps.front().mean.size());
  double total = 0.0;
  for (const auto& c : comps) {
    if (c.weight < 0.0)
      throw InvalidParameter("gaussian_mixture: negative weight");
    if (c.mean.size() != static_cast<size_t>(spec.dim_) ||
        c.scale.size() != static_cast<size_t>(spec.dim_))
      throw InvalidParameter("gaussian_mixture: dimension mismatch");
    for (double s : c.scale)
      if (!(s > 0.0))
        throw InvalidParameter("gaussian_mixture: scales must be positive");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidParameter("gaussian_mixture: weights must sum to 1");
  spec.comps_ = std::move(comps);
  return spec;
}

DensitySpec DensitySpec::product_laplace(int dim, double scale)
{
  if (dim < 1 || !(scale > 0.0))
    throw InvalidParameter("product_laplace: bad parameters");
  DensitySpec spec;
  spec.form_ = Form::product_laplace;
  spec.dim_ = dim;
  spec.laplace_scale_ = scale;
  return spec;
}

DensitySpec DensitySpec::bessel_k(double shape)
{
  if (!(shape > 0.5))
    throw InvalidParameter("bessel_k: shape must exceed 1/2");
  DensitySpec spec;
  spec.form_ = Form::bessel_k;
  spec.dim_ = 1;
  spec.bessel_shape_ = shape;
  return spec;
}

DensitySpec DensitySpec::custom(GriddedFunction density)
{
  if (density.grid.dim() > 2)
    throw InvalidParameter("custom density: only d <= 2 supported");
  if ((density.values < 0.0).any())
    throw InvalidParameter("custom density: negative values");
  const double mass = density.integral();
  if (!(mass > 0.0))
    throw InvalidParameter("custom density: zero mass");
  density.values /= mass;

  DensitySpec spec;
  spec.form_ = Form::custom_grid;
  spec.dim_ = density.grid.dim();
  // cumulative cell masses in row-major cell order, for inverse-CDF sampling
  const auto& g = density.grid;
  std::vector<double> cdf;
  if (spec.dim_ == 1) {
    const Eigen::Index n = g.points_per_dim()[0];
    cdf.resize(n - 1);
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      acc += 0.5 * (density.values[i] + density.values[i + 1]) *
             g.spacing()[0];
      cdf[i] = acc;
    }
  } else {
    const Eigen::Index n0 = g.points_per_dim()[0];
    const Eigen::Index n1 = g.points_per_dim()[1];
    cdf.resize((n0 - 1) * (n1 - 1));
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n0; ++i)
      for (Eigen::Index j = 0; j + 1 < n1; ++j) {
        const double cell =
          0.25 *
          (density.values[i * n1 + j] + density.values[i * n1 + j + 1] +
           density.values[(i + 1) * n1 + j] +
           density.values[(i + 1) * n1 + j + 1]) *
          g.cell_volume();
        acc += cell;
        cdf[i * (n1 - 1) + j] = acc;
      }
  }
  for (double& v : cdf)
    v /= cdf.back();
  spec.custom_ = std::make_shared<const GriddedFunction>(std::move(density));
  spec.custom_cdf_ = std::make_shared<const std::vector<double>>(std::move(cdf));
  return spec;
}

double DensitySpec::eval(const double* x) const
{
  switch (form_) {
    case Form::gaussian_mixture: {
      double v = 0.0;
      for (const auto& c : comps_) {
        double term = c.weight;
        for (int j = 0; j < dim_; ++j)
          term *= phi((x[j] - c.mean[j]) / c.scale[j]) / c.scale[j];
        v += term;
      }
      return v;
    }
    case Form::product_laplace: {
      double v = 1.0;
      for (int j = 0; j < dim_; ++j)
        v *= std::exp(-std::abs(x[j]) / laplace_scale_) /
             (2.0 * laplace_scale_);
      return v;
    }
    case Form::bessel_k: {
      const double k = bessel_shape_;
      const double a = std::abs(x[0]);
      const double c =
        std::pow(2.0, 0.5 - k) / (std::sqrt(kPi) * std::tgamma(k));
      if (a < 1e-8)
        return std::tgamma(k - 0.5) / (2.0 * std::sqrt(kPi) * std::tgamma(k));
      return c * std::pow(a, k - 0.5) * std::cyl_bessel_k(k - 0.5, a);
    }
    case Form::custom_grid: {
      // multilinear interpolation, zero outside the box
      const auto& f = *custom_;
      const auto& g = f.grid;
      double weight[2][2] = { { 1.0, 0.0 }, { 1.0, 0.0 } };
      Eigen::Index cell[2] = { 0, 0 };
      for (int j = 0; j < dim_; ++j) {
        const double pos = (x[j] - g.lower()[j]) / g.spacing()[j];
        if (pos < 0.0 || pos > static_cast<double>(g.points_per_dim()[j] - 1))
          return 0.0;
        auto lo = static_cast<Eigen::Index>(pos);
        lo = std::min(lo, g.points_per_dim()[j] - 2);
        cell[j] = lo;
        weight[j][1] = pos - static_cast<double>(lo);
        weight[j][0] = 1.0 - weight[j][1];
      }
      double v = 0.0;
      const int corners = 1 << dim_;
      std::vector<Eigen::Index> mi(dim_);
      for (int corner = 0; corner < corners; ++corner) {
        double w = 1.0;
        for (int j = 0; j < dim_; ++j) {
          const int bit = (corner >> j) & 1;
          mi[j] = cell[j] + bit;
          w *= weight[j][bit];
        }
        v += w * f.values[g.flat_index(mi)];
      }
      return v;
    }
  }
  return 0.0;
}

GriddedFunction DensitySpec::on_grid(const UniformGrid& grid) const
{
  if (grid.dim() != dim_)
    throw IncompatibleGrid("density on_grid: dimension mismatch");
  Eigen::ArrayXd values(grid.total_points());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = grid.node(i);
    values[i] = eval(x.data());
  }
  return GriddedFunction(grid, std::move(values));
}

void DensitySpec::sample_point(rng::Stream& stream, double* out) const
{
  switch (form_) {
    case Form::gaussian_mixture: {
      const double u = stream.uniform();
      double acc = 0.0;
      const GaussianComponent* pick = &comps_.back();
      for (const auto& c : comps_) {
        acc += c.weight;
        if (u < acc) {
          pick = &c;
          break;
        }
      }
      for (int j = 0; j < dim_; ++j)
        out[j] = pick->mean[j] + pick->scale[j] * stream.normal();
      return;
    }
    case Form::product_laplace:
      for (int j = 0; j < dim_; ++j)
        out[j] = stream.laplace(laplace_scale_);
      return;
    case Form::bessel_k: {
      const double g = stream.gamma(bessel_shape_);
      out[0] = std::sqrt(2.0 * g) * stream.normal();
      return;
    }
    case Form::custom_grid: {
      const auto& cdf = *custom_cdf_;
      const auto& g = custom_->grid;
      const double u = stream.uniform();
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      const auto cell =
        static_cast<Eigen::Index>(std::distance(cdf.begin(), it));
      if (dim_ == 1) {
        out[0] = g.coord(0, cell) + stream.uniform() * g.spacing()[0];
      } else {
        const Eigen::Index cells1 = g.points_per_dim()[1] - 1;
        out[0] = g.coord(0, cell / cells1) + stream.uniform() * g.spacing()[0];
        out[1] = g.coord(1, cell % cells1) + stream.uniform() * g.spacing()[1];
      }
      return;
    }
  }
}

double DensitySpec::derivative(const double* x, const std::vector<int>& m) const
{
  if (!has_exact_derivatives())
    throw UnsupportedOperation(
      "exact derivatives are available for Gaussian mixtures only");
  double v = 0.0;
  for (const auto& c : comps_) {
    double term = c.weight;
    for (int j = 0; j < dim_; ++j) {
      const double z = (x[j] - c.mean[j]) / c.scale[j];
      const double sign = m[j] % 2 ? -1.0 : 1.0;
      term *= sign * hermite(m[j], z) * phi(z) /
              std::pow(c.scale[j], m[j] + 1);
    }
    v += term;
  }
  return v;
}

double DensitySpec::truncation_mass(const UniformGrid& grid) const
{
  return 1.0 - on_grid(grid).integral();
}

NoiseSpec NoiseSpec::gaussian(int dim, double sigma)
{
  if (dim < 1 || !(sigma > 0.0))
    throw InvalidParameter("noise gaussian: bad parameters");
  NoiseSpec g;
  g.family_ = Family::gaussian;
  g.dim_ = dim;
  g.sigma_ = sigma;
  return g;
}

NoiseSpec NoiseSpec::laplace(int dim, double scale)
{
  if (dim < 1 || !(scale > 0.0))
    throw InvalidParameter("noise laplace: bad parameters");
  NoiseSpec g;
  g.family_ = Family::laplace;
  g.dim_ = dim;
  g.scale_ = scale;
  return g;
}

NoiseSpec NoiseSpec::gamma(int dim, double shape, double rate, bool centered)
{
  if (dim < 1 || !(shape > 0.0) || !(rate > 0.0))
    throw InvalidParameter("noise gamma: bad parameters");
  NoiseSpec g;
  g.family_ = Family::gamma;
  g.dim_ = dim;
  g.shape_ = shape;
  g.rate_ = rate;
  g.centered_ = centered;
  return g;
}

std::complex<double> NoiseSpec::char_fn1(double t) const
{
  using namespace std::complex_literals;
  switch (family_) {
    case Family::gaussian:
      return std::exp(-0.5 * sigma_ * sigma_ * t * t);
    case Family::laplace:
      return 1.0 / (1.0 + scale_ * scale_ * t * t);
    case Family::gamma: {
      const std::complex<double> base =
        std::pow(1.0 - 1i * (t / rate_), -shape_);
      if (!centered_)
        return base;
      return base * std::exp(-1i * (t * shape_ / rate_));
    }
  }
  return 0.0;
}

std::complex<double> NoiseSpec::char_fn(const double* t) const
{
  std::complex<double> v = 1.0;
  for (int j = 0; j < dim_; ++j)
    v *= char_fn1(t[j]);
  return v;
}

double NoiseSpec::density1(double y) const
{
  switch (family_) {
    case Family::gaussian:
      return phi(y / sigma_) / sigma_;
    case Family::laplace:
      return std::exp(-std::abs(y) / scale_) / (2.0 * scale_);
    case Family::gamma: {
      const double shifted = centered_ ? y + shape_ / rate_ : y;
      if (shifted <= 0.0)
        return 0.0;
      return std::pow(rate_, shape_) * std::pow(shifted, shape_ - 1.0) *
             std::exp(-rate_ * shifted) / std::tgamma(shape_);
    }
  }
  return 0.0;
}

GriddedFunction NoiseSpec::on_grid(const UniformGrid& grid) const
{
  if (grid.dim() != dim_)
    throw IncompatibleGrid("noise on_grid: dimension mismatch");
  Eigen::ArrayXd values(grid.total_points());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = grid.node(i);
    double v = 1.0;
    for (int j = 0; j < dim_; ++j)
      v *= density1(x[j]);
    values[i] = v;
  }
  return GriddedFunction(grid, std::move(values));
}

void NoiseSpec::sample_point(rng::Stream& stream, double* out) const
{
  for (int j = 0; j < dim_; ++j) {
    switch (family_) {
      case Family::gaussian:
        out[j] = sigma_ * stream.normal();
        break;
      case Family::laplace:
        out[j] = stream.laplace(scale_);
        break;
      case Family::gamma: {
        const double v = stream.gamma(shape_) / rate_;
        out[j] = centered_ ? v - shape_ / rate_ : v;
        break;
      }
    }
  }
}

ContaminationSpec::ContaminationSpec(double a)
  : alpha(a)
{
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidParameter("ContaminationSpec: alpha must lie in [0, 1]");
}

DatasetPair sample_contaminated(const DensitySpec& f, const NoiseSpec& g,
                                const ContaminationSpec& alpha,
                                Eigen::Index n, std::uint64_t seed,
                                std::uint64_t replication)
{
  if (n < 4)
    throw InvalidParameter("sample_contaminated: n must be >= 4");
  if (f.dim() != g.dim())
    throw InvalidParameter("sample_contaminated: dimension mismatch");
  const int d = f.dim();

  rng::Stream x_stream(rng::derive_stream(seed, replication, 0));
  rng::Stream y_stream(rng::derive_stream(seed, replication, 1));
  rng::Stream e_stream(rng::derive_stream(seed, replication, 2));

  std::vector<double> z(static_cast<size_t>(n) * d);
  std::vector<double> y(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double* zi = z.data() + i * d;
    f.sample_point(x_stream, zi);
    if (e_stream.bernoulli(alpha.alpha)) {
      g.sample_point(y_stream, y.data());
      for (int j = 0; j < d; ++j)
        zi[j] += y[j];
    }
  }

  const Eigen::Index half = n / 2;
  std::vector<double> first(z.begin(), z.begin() + half * d);
  std::vector<double> second(z.begin() + half * d, z.end());
  return DatasetPair{ Sample(d, std::move(first)), Sample(d, std::move(second)),
                      n, seed, replication };
}

Assumption1Report check_assumption1(const NoiseSpec& g, double alpha)
{
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidParameter("check_assumption1: alpha must lie in [0, 1]");
  Assumption1Report report;

  if (alpha < 1.0) {
    // denominator of the Fourier quotient along a fine frequency grid;
    // the |t| -> infinity limit is 1 - alpha for any integrable noise law
    double inf = 1.0 - alpha;
    const int n = 80001;
    for (int i = 0; i < n; ++i) {
      const double t = -200.0 + 400.0 * i / (n - 1);
      const double v = std::abs(1.0 - alpha + alpha * std::conj(g.char_fn1(t)));
      inf = std::min(inf, v);
    }
    report.varpi = inf;
    report.satisfied = inf > 1e-8;
    return report;
  }

  // alpha = 1: fit log|g_check(t)| against log t on two disjoint far-field
  // windows.  A polynomial tail c * t^{-mu} gives slope -mu on both windows
  // regardless of the scale of the noise law; a super-polynomial tail gives
  // diverging (or degenerate) slopes.
  auto fit_slope = [&](double t_lo, double t_hi) {
    const int n = 200;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double t =
        t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1));
      const double gv = std::abs(g.char_fn1(t));
      if (!(gv > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
      const double x = std::log(t);
      const double y = std::log(gv);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const double mu_near = -fit_slope(500.0, 5000.0);
  const double mu_far = -fit_slope(5000.0, 50000.0);
  if (!(mu_near > 0.0) || !(mu_far > 0.0) ||
      std::abs(mu_near - mu_far) > 0.05) {
    report.satisfied = false; // super-polynomial decay: severely ill-posed
    return report;
  }
  const double mu = mu_far;
  report.mu.assign(g.dim(), mu);
  double g1 = 1.0, g2 = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 500.0 * i / 2000.0;
    const double ratio =
      std::abs(g.char_fn1(t)) * std::pow(1.0 + t * t, mu / 2.0);
    g1 = std::min(g1, ratio);
    g2 = std::max(g2, ratio);
  }
  report.g1 = g1;
  report.g2 = g2;
  report.satisfied = g1 > 1e-8;
  return report;
}

GriddedFunction observed_density(const DensitySpec& f, const NoiseSpec& g,
                                 double alpha, const UniformGrid& grid)
{
  GriddedFunction fg = f.on_grid(grid);
  if (alpha == 0.0)
    return fg;
  GriddedFunction gg = g.on_grid(grid);
  GriddedFunction conv = numerics::restrict_to(numerics::convolve(fg, gg), grid);
  return GriddedFunction(grid,
                         (1.0 - alpha) * fg.values + alpha * conv.values);
}

} // namespace adaptkde::models

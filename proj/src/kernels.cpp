#include "adaptkde/kernels.hpp"

#include "adaptkde/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace adaptkde::kernels {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double x)
{
  if (std::abs(x) < 1e-8)
    return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

//! Normalization of exp(-1/(1-y^2)) on (-1,1), computed once by quadrature.
double bump_normalization()
{
  static const double c = [] {
    const int n = 200001;
    const double step = 2.0 / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = -1.0 + i * step;
      const double q = y * y - 1.0;
      const double v = q < 0.0 ? std::exp(1.0 / q) : 0.0;
      sum += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return 1.0 / (sum * step);
  }();
  return c;
}

//! probabilists' Hermite polynomial He_r(y)
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

using Poly = std::vector<double>; // coefficients, ascending powers

Poly poly_mul(const Poly& a, const Poly& b)
{
  Poly out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_diff(const Poly& a)
{
  if (a.size() <= 1)
    return { 0.0 };
  Poly out(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i)
    out[i - 1] = a[i] * static_cast<double>(i);
  return out;
}

Poly poly_axpy(Poly a, const Poly& b, double scale)
{
  a.resize(std::max(a.size(), b.size()), 0.0);
  for (size_t i = 0; i < b.size(); ++i)
    a[i] += scale * b[i];
  return a;
}

double poly_eval(const Poly& a, double y)
{
  double v = 0.0;
  for (size_t i = a.size(); i-- > 0;)
    v = v * y + a[i];
  return v;
}

//! w^{(r)}(y) = w(y) P_r(y) / (y^2-1)^{2r} for the bump base; the P_r obey
//! P_{r+1} = (y^2-1)^2 P_r' - (2r (y^2-1) 2y + 2y) P_r, P_0 = 1.
const Poly& bump_derivative_poly(int r)
{
  static std::vector<Poly> polys = { { 1.0 } };
  static std::mutex mtx;
  std::lock_guard lock(mtx);
  const Poly q = { -1.0, 0.0, 1.0 };  // y^2 - 1
  const Poly q2 = poly_mul(q, q);
  while (static_cast<int>(polys.size()) <= r) {
    const int k = static_cast<int>(polys.size()) - 1;
    const Poly& pk = polys.back();
    Poly next = poly_mul(q2, poly_diff(pk));
    // -(2k * q * q' + 2y) P_k  with q' = 2y
    Poly damp = poly_mul(q, { 0.0, 4.0 * k });
    damp = poly_axpy(std::move(damp), { 0.0, 2.0 }, 1.0);
    next = poly_axpy(std::move(next), poly_mul(damp, pk), -1.0);
    polys.push_back(std::move(next));
  }
  return polys[r];
}

double binomial(int n, int k)
{
  double v = 1.0;
  for (int i = 1; i <= k; ++i)
    v = v * (n - k + i) / i;
  return v;
}

//! Composite Simpson of fn over [-radius, radius].
template <typename Fn>
double simpson(Fn&& fn, double radius, Eigen::Index n)
{
  if (n % 2 == 0)
    ++n;
  const double step = 2.0 * radius / static_cast<double>(n - 1);
  double sum = fn(-radius) + fn(radius);
  for (Eigen::Index i = 1; i < n - 1; ++i)
    sum += fn(-radius + step * i) * (i % 2 ? 4.0 : 2.0);
  return sum * step / 3.0;
}

} // namespace

double Kernel1D::derivative(double, int) const
{
  throw UnsupportedOperation("kernel has no closed-form derivatives");
}

double Kernel1D::fourier(double) const
{
  throw UnsupportedOperation("kernel has no closed-form Fourier transform");
}

OrderSKernel1D::OrderSKernel1D(BaseDensity base, int order_s)
  : base_(base)
  , s_(order_s)
{
  if (order_s < 1)
    throw InvalidParameter("OrderSKernel1D: order must be >= 1");
  coeff_.resize(s_);
  for (int i = 1; i <= s_; ++i)
    coeff_[i - 1] = binomial(s_, i) * (i % 2 ? 1.0 : -1.0) / i;
}

double OrderSKernel1D::base_eval(double y) const
{
  if (base_ == BaseDensity::gaussian)
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi);
  const double q = y * y - 1.0;
  return q < 0.0 ? bump_normalization() * std::exp(1.0 / q) : 0.0;
}

double OrderSKernel1D::base_derivative(double y, int order) const
{
  if (order == 0)
    return base_eval(y);
  if (base_ == BaseDensity::gaussian) {
    const double sign = order % 2 ? -1.0 : 1.0;
    return sign * hermite(order, y) * base_eval(y);
  }
  const double q = y * y - 1.0;
  if (q >= 0.0)
    return 0.0;
  const Poly& p = bump_derivative_poly(order);
  return base_eval(y) * poly_eval(p, y) / std::pow(q, 2 * order);
}

double OrderSKernel1D::eval(double y) const
{
  double v = 0.0;
  for (int i = 1; i <= s_; ++i)
    v += coeff_[i - 1] * base_eval(y / i);
  return v;
}

double OrderSKernel1D::derivative(double y, int order) const
{
  double v = 0.0;
  for (int i = 1; i <= s_; ++i)
    v += coeff_[i - 1] * base_derivative(y / i, order) /
         std::pow(static_cast<double>(i), order);
  return v;
}

double OrderSKernel1D::quadrature_radius() const
{
  return base_ == BaseDensity::gaussian ? 10.0 * s_ : static_cast<double>(s_);
}

double BandLimitedKernel1D::eval(double y) const
{
  const double x = std::abs(y);
  // (sin x + sin 2x)/x, stable at x = 0
  const double s = sinc(x) + 2.0 * sinc(2.0 * x);
  if (std::abs(x - kPi) > 1e-4)
    return kPi * s / (2.0 * (kPi * kPi - x * x));
  // removable singularity at |x| = pi
  const double e = kPi - x;
  const double r = std::abs(e) < 1e-7
                     ? -1.0 + 7.0 / 6.0 * e * e
                     : (std::sin(e) - std::sin(2.0 * e)) / e;
  return kPi * r / (2.0 * x * (kPi + x));
}

double BandLimitedKernel1D::fourier(double t) const
{
  const double a = std::abs(t);
  if (a <= 1.0)
    return 1.0;
  if (a >= 2.0)
    return 0.0;
  const double c = std::cos(kPi * (a - 1.0) / 2.0);
  return c * c;
}

BandwidthVec::BandwidthVec(std::vector<double> h)
  : h_(std::move(h))
{
  if (h_.empty())
    throw InvalidParameter("BandwidthVec: empty");
  volume_ = 1.0;
  for (double hj : h_) {
    if (!(hj > 0.0) || hj > 1.0)
      throw InvalidParameter("BandwidthVec: components must lie in (0,1]");
    volume_ *= hj;
  }
}

BandwidthVec BandwidthVec::dyadic(const std::vector<int>& exponents)
{
  std::vector<double> h(exponents.size());
  for (size_t j = 0; j < exponents.size(); ++j)
    h[j] = std::ldexp(1.0, -exponents[j]);
  return BandwidthVec(std::move(h));
}

ProductKernel::ProductKernel(
  std::vector<std::shared_ptr<const Kernel1D>> factors)
  : factors_(std::move(factors))
  , norm_cache_(std::make_shared<NormCache>())
{
  if (factors_.empty())
    throw InvalidParameter("ProductKernel: no factors");
}

ProductKernel ProductKernel::order_s(int dim, BaseDensity base, int s)
{
  auto k = std::make_shared<const OrderSKernel1D>(base, s);
  return ProductKernel(
    std::vector<std::shared_ptr<const Kernel1D>>(dim, k));
}

ProductKernel ProductKernel::band_limited(int dim)
{
  auto k = std::make_shared<const BandLimitedKernel1D>();
  return ProductKernel(
    std::vector<std::shared_ptr<const Kernel1D>>(dim, k));
}

double ProductKernel::eval(const double* x) const
{
  double v = 1.0;
  for (int j = 0; j < dim(); ++j)
    v *= factors_[j]->eval(x[j]);
  return v;
}

bool ProductKernel::has_derivatives() const
{
  for (const auto& f : factors_)
    if (!f->has_derivatives())
      return false;
  return true;
}

double ProductKernel::eval_derivative(const double* x,
                                      const std::vector<int>& m) const
{
  if (m.size() != static_cast<size_t>(dim()))
    throw InvalidParameter("eval_derivative: multi-index dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < dim(); ++j)
    v *= m[j] == 0 ? factors_[j]->eval(x[j])
                   : factors_[j]->derivative(x[j], m[j]);
  return v;
}

double ProductKernel::norm(double p) const
{
  if (p < 1.0)
    throw InvalidParameter("ProductKernel::norm: p must be >= 1");
  std::lock_guard lock(norm_cache_->mutex);
  auto it = norm_cache_->values.find(p);
  if (it != norm_cache_->values.end())
    return it->second;
  double norm_p = 1.0;
  for (const auto& f : factors_) {
    const double radius = f->quadrature_radius();
    const auto n = static_cast<Eigen::Index>(
      std::max<double>(1 << 15, radius * 256.0));
    const double factor_p = simpson(
      [&](double y) { return std::pow(std::abs(f->eval(y)), p); }, radius, n);
    norm_p *= factor_p;
  }
  const double result = std::pow(norm_p, 1.0 / p);
  norm_cache_->values.emplace(p, result);
  return result;
}

double eval_scaled(const ProductKernel& K, const BandwidthVec& h,
                   const double* t)
{
  double v = 1.0 / h.volume();
  for (int j = 0; j < K.dim(); ++j)
    v *= K.factor(j).eval(t[j] / h[j]);
  return v;
}

double eval_scaled_derivative(const ProductKernel& K, const BandwidthVec& h,
                              const std::vector<int>& m, const double* t)
{
  double v = 1.0 / h.volume();
  for (int j = 0; j < K.dim(); ++j) {
    const double y = t[j] / h[j];
    const double factor = m[j] == 0 ? K.factor(j).eval(y)
                                    : K.factor(j).derivative(y, m[j]);
    v *= factor * std::pow(h[j], -m[j]);
  }
  return v;
}

namespace {

UniformGrid kernel_grid(const ProductKernel& K, const BandwidthVec& h,
                        const std::vector<double>& spacing, double max_radius)
{
  const int d = K.dim();
  std::vector<double> lower(d), upper(d);
  std::vector<Eigen::Index> npts(d);
  for (int j = 0; j < d; ++j) {
    const double radius =
      std::min(h[j] * K.factor(j).quadrature_radius(), max_radius);
    const auto half =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(
                                  std::ceil(radius / spacing[j])));
    lower[j] = -static_cast<double>(half) * spacing[j];
    upper[j] = static_cast<double>(half) * spacing[j];
    npts[j] = 2 * half + 1;
  }
  return UniformGrid(lower, upper, npts);
}

} // namespace

GriddedFunction kernel_on_grid(const ProductKernel& K, const BandwidthVec& h,
                               const std::vector<double>& spacing,
                               double max_radius)
{
  UniformGrid grid = kernel_grid(K, h, spacing, max_radius);
  Eigen::ArrayXd values(grid.total_points());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = grid.node(i);
    values[i] = eval_scaled(K, h, x.data());
  }
  return GriddedFunction(std::move(grid), std::move(values));
}

GriddedFunction kernel_derivative_on_grid(const ProductKernel& K,
                                          const BandwidthVec& h,
                                          const std::vector<int>& m,
                                          const std::vector<double>& spacing,
                                          double max_radius)
{
  UniformGrid grid = kernel_grid(K, h, spacing, max_radius);
  Eigen::ArrayXd values(grid.total_points());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = grid.node(i);
    values[i] = eval_scaled_derivative(K, h, m, x.data());
  }
  return GriddedFunction(std::move(grid), std::move(values));
}

GriddedFunction pair_kernel(const ProductKernel& K, const BandwidthVec& h,
                            const BandwidthVec& eta, const UniformGrid& grid)
{
  const BandwidthVec* first = &h;
  const BandwidthVec* second = &eta;
  if (eta.h() < h.h())
    std::swap(first, second);
  const double max_radius = grid.upper()[0] - grid.lower()[0];
  auto kf = kernel_on_grid(K, *first, grid.spacing(), max_radius);
  auto ks = kernel_on_grid(K, *second, grid.spacing(), max_radius);
  return numerics::convolve(kf, ks);
}

} // namespace adaptkde::kernels

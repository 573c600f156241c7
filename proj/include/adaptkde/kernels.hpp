#pragma once

#include "grid.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace adaptkde::kernels {

enum class BaseDensity
{
  gaussian, //!< standard normal density
  bump      //!< normalized C-infinity bump supported on [-1, 1]
};

//! One-dimensional kernel: pointwise evaluation plus optional analytic
//! derivatives and Fourier transform.
class Kernel1D
{
public:
  virtual ~Kernel1D() = default;

  virtual double eval(double y) const = 0;

  //! Exact analytic derivative of the given order (order 0 = eval).
  virtual double derivative(double y, int order) const;
  virtual bool has_derivatives() const { return false; }

  //! Fourier transform K_check(t) = int K(y) exp(-i t y) dy (real, even K).
  virtual double fourier(double t) const;
  virtual bool has_fourier() const { return false; }

  //! Radius beyond which the kernel is negligible for quadrature purposes.
  virtual double quadrature_radius() const = 0;
};

//! Order-s kernel built from a base density w by the alternating-binomial
//! sum  K_s(y) = sum_{i=1..s} C(s,i) (-1)^{i+1} (1/i) w(y/i).
//! Integrates to one and has vanishing moments of orders 1..s-1.
class OrderSKernel1D : public Kernel1D
{
public:
  OrderSKernel1D(BaseDensity base, int order_s);

  double eval(double y) const override;
  double derivative(double y, int order) const override;
  bool has_derivatives() const override { return true; }
  double quadrature_radius() const override;

  BaseDensity base() const { return base_; }
  int order_s() const { return s_; }

private:
  double base_eval(double y) const;
  double base_derivative(double y, int order) const;

  BaseDensity base_;
  int s_;
  std::vector<double> coeff_; // C(s,i) (-1)^{i+1} / i, i = 1..s
};

//! Band-limited kernel with raised-cosine taper in frequency:
//! K_check(t) = 1 on [-1,1], cos^2(pi(|t|-1)/2) on 1 < |t| < 2, 0 beyond.
//! In space: K(x) = pi (sin x + sin 2x) / (2 x (pi^2 - x^2)).
class BandLimitedKernel1D : public Kernel1D
{
public:
  double eval(double y) const override;
  double fourier(double t) const override;
  bool has_fourier() const override { return true; }
  double quadrature_radius() const override { return 2000.0; }
};

//! Anisotropic bandwidth h in (0,1]^d.
class BandwidthVec
{
public:
  //! Empty placeholder (dim 0, volume 1); filled in by assignment.
  BandwidthVec() : volume_(1.0) {}
  explicit BandwidthVec(std::vector<double> h);
  //! Dyadic bandwidth 2^{-k_j} per axis.
  static BandwidthVec dyadic(const std::vector<int>& exponents);

  int dim() const { return static_cast<int>(h_.size()); }
  const std::vector<double>& h() const { return h_; }
  double operator[](int j) const { return h_[j]; }
  double volume() const { return volume_; }

  bool operator==(const BandwidthVec& o) const { return h_ == o.h_; }

private:
  std::vector<double> h_;
  double volume_;
};

//! Product kernel K(x) = prod_j factor_j(x_j) with cached L_p norms.
class ProductKernel
{
public:
  explicit ProductKernel(
    std::vector<std::shared_ptr<const Kernel1D>> factors);

  static ProductKernel order_s(int dim, BaseDensity base, int s);
  static ProductKernel band_limited(int dim);

  int dim() const { return static_cast<int>(factors_.size()); }
  const Kernel1D& factor(int j) const { return *factors_[j]; }

  double eval(const double* x) const;
  bool has_derivatives() const;
  //! Exact partial derivative of multi-index order m.
  double eval_derivative(const double* x, const std::vector<int>& m) const;

  //! Quadrature L_p norm, cached (tolerance of the cached quadrature is
  //! recorded in norm_quadrature_tolerance()).
  double norm(double p) const;
  double norm1() const { return norm(1.0); }
  static double norm_quadrature_tolerance() { return 1e-6; }

private:
  struct NormCache
  {
    std::map<double, double> values;
    std::mutex mutex;
  };

  std::vector<std::shared_ptr<const Kernel1D>> factors_;
  std::shared_ptr<NormCache> norm_cache_; //!< shared by copies
};

//! K_h(t) = V_h^{-1} K(t_1/h_1, ..., t_d/h_d).
double eval_scaled(const ProductKernel& K, const BandwidthVec& h,
                   const double* t);

//! (K_h)^{(m)}(t) = V_h^{-1} prod_j h_j^{-m_j} K^{(m)}(t/h).
double eval_scaled_derivative(const ProductKernel& K, const BandwidthVec& h,
                              const std::vector<int>& m, const double* t);

//! Sample K_h on a zero-centered grid whose nodes are integer multiples of
//! `spacing` and which covers the kernel support (clipped to max_radius).
GriddedFunction kernel_on_grid(const ProductKernel& K, const BandwidthVec& h,
                               const std::vector<double>& spacing,
                               double max_radius);

//! Same, for the exact partial derivative of K_h.
GriddedFunction kernel_derivative_on_grid(const ProductKernel& K,
                                          const BandwidthVec& h,
                                          const std::vector<int>& m,
                                          const std::vector<double>& spacing,
                                          double max_radius);

//! K_h * K_eta on a grid with the spacing of `grid`; the (h, eta) pair is
//! put in canonical order first so the two argument orders are bit-identical.
GriddedFunction pair_kernel(const ProductKernel& K, const BandwidthVec& h,
                            const BandwidthVec& eta, const UniformGrid& grid);

} // namespace adaptkde::kernels

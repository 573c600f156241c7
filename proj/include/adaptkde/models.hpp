#pragma once

#include "grid.hpp"
#include "rng.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <vector>

namespace adaptkde::models {

//! Ground-truth density with exact pointwise evaluation and exact sampling.
class DensitySpec
{
public:
  enum class Form
  {
    gaussian_mixture,
    product_laplace,
    bessel_k, //!< d=1 variance-gamma law with char. function (1+t^2)^{-shape}
    custom_grid
  };

  struct GaussianComponent
  {
    double weight;
    std::vector<double> mean;
    std::vector<double> scale; // per-axis standard deviation
  };

  static DensitySpec gaussian_mixture(std::vector<GaussianComponent> comps);
  static DensitySpec product_laplace(int dim, double scale);
  static DensitySpec bessel_k(double shape);
  //! Nonnegative gridded density, renormalized to mass one; d <= 2 only,
  //! sampled by inverse CDF per dimension conditionally.
  static DensitySpec custom(GriddedFunction density);

  Form form() const { return form_; }
  int dim() const { return dim_; }

  double eval(const double* x) const;
  GriddedFunction on_grid(const UniformGrid& grid) const;
  void sample_point(rng::Stream& stream, double* out) const;

  //! Exact partial derivatives are available for Gaussian mixtures only.
  bool has_exact_derivatives() const
  {
    return form_ == Form::gaussian_mixture;
  }
  double derivative(const double* x, const std::vector<int>& m) const;

  //! Mass lying outside the given box (truncation diagnostic), by
  //! one-minus-quadrature on the box.
  double truncation_mass(const UniformGrid& grid) const;

private:
  DensitySpec() = default;

  Form form_ = Form::gaussian_mixture;
  int dim_ = 1;
  std::vector<GaussianComponent> comps_;
  double laplace_scale_ = 1.0;
  double bessel_shape_ = 1.0;
  std::shared_ptr<const GriddedFunction> custom_;
  std::shared_ptr<const std::vector<double>> custom_cdf_; // cell masses, cumulative
};

//! Known noise law as a d-fold product with closed-form characteristic
//! function.
class NoiseSpec
{
public:
  enum class Family
  {
    gaussian,
    laplace,
    gamma
  };

  static NoiseSpec gaussian(int dim, double sigma);
  static NoiseSpec laplace(int dim, double scale);
  static NoiseSpec gamma(int dim, double shape, double rate,
                         bool centered = true);

  Family family() const { return family_; }
  int dim() const { return dim_; }

  //! Characteristic function of one coordinate.
  std::complex<double> char_fn1(double t) const;
  //! Characteristic function of the d-dimensional product law.
  std::complex<double> char_fn(const double* t) const;

  double density1(double y) const;
  GriddedFunction on_grid(const UniformGrid& grid) const;

  void sample_point(rng::Stream& stream, double* out) const;

private:
  Family family_ = Family::gaussian;
  int dim_ = 1;
  double sigma_ = 1.0;
  double scale_ = 1.0;
  double shape_ = 1.0;
  double rate_ = 1.0;
  bool centered_ = true;
};

//! Bernoulli contamination level.
struct ContaminationSpec
{
  explicit ContaminationSpec(double a);
  double alpha;
};

//! Split observation set: selection uses the first half, the final
//! estimator only the second.
struct DatasetPair
{
  Sample first_half;
  Sample second_half;
  Eigen::Index n;
  std::uint64_t master_seed;
  std::uint64_t replication;
};

//! Z_i = X_i + eps_i Y_i with eps ~ Bernoulli(alpha), split into halves.
//! X, Y and eps each draw from their own derived substream.
DatasetPair sample_contaminated(const DensitySpec& f, const NoiseSpec& g,
                                const ContaminationSpec& alpha,
                                Eigen::Index n, std::uint64_t seed,
                                std::uint64_t replication = 0);

struct Assumption1Report
{
  bool satisfied = false;
  double varpi = 0.0;              //!< alpha < 1 case
  std::vector<double> mu;          //!< alpha = 1 case, per-axis exponents
  double g1 = 0.0, g2 = 0.0;       //!< alpha = 1 case, envelope constants
};

Assumption1Report check_assumption1(const NoiseSpec& g, double alpha);

//! (1-alpha) f + alpha (g * f) on the grid -- the density of Z.
GriddedFunction observed_density(const DensitySpec& f, const NoiseSpec& g,
                                 double alpha, const UniformGrid& grid);

} // namespace adaptkde::models

#include "adaptkde/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace adaptkde::numerics {

double lp_norm(const GriddedFunction& f, double p)
{
  if (p < 1.0)
    throw InvalidParameter("lp_norm: p must be >= 1");
  const double cell = f.grid.cell_volume();
  if (p == 1.0)
    return f.values.abs().sum() * cell;
  if (p == 2.0)
    return std::sqrt(f.values.square().sum() * cell);
  return std::pow(f.values.abs().pow(p).sum() * cell, 1.0 / p);
}

Eigen::Index next_pow2(Eigen::Index n)
{
  Eigen::Index p = 1;
  while (p < n)
    p *= 2;
  return p;
}

void fft_nd(std::vector<std::complex<double>>& data,
            const std::vector<Eigen::Index>& dims, bool inverse)
{
  const int d = static_cast<int>(dims.size());
  Eigen::Index total = 1;
  for (auto n : dims)
    total *= n;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line, out;
  for (int axis = 0; axis < d; ++axis) {
    const Eigen::Index n = dims[axis];
    Eigen::Index inner = 1; // stride of consecutive elements along `axis`
    for (int j = axis + 1; j < d; ++j)
      inner *= dims[j];
    const Eigen::Index outer = total / (n * inner);
    line.resize(n);
    out.resize(n);
    for (Eigen::Index o = 0; o < outer; ++o) {
      for (Eigen::Index i = 0; i < inner; ++i) {
        const Eigen::Index base = o * n * inner + i;
        for (Eigen::Index k = 0; k < n; ++k)
          line[k] = data[base + k * inner];
        if (inverse)
          fft.inv(out, line);
        else
          fft.fwd(out, line);
        for (Eigen::Index k = 0; k < n; ++k)
          data[base + k * inner] = out[k];
      }
    }
  }
}

GriddedFunction convolve(const GriddedFunction& f, const GriddedFunction& g)
{
  const auto& gf = f.grid;
  const auto& gg = g.grid;
  if (!gf.same_spacing(gg))
    throw IncompatibleGrid("convolve: grids must share spacing");
  const int d = gf.dim();

  std::vector<Eigen::Index> out_n(d), pad_n(d);
  std::vector<double> lower(d), upper(d);
  for (int j = 0; j < d; ++j) {
    out_n[j] = gf.points_per_dim()[j] + gg.points_per_dim()[j] - 1;
    pad_n[j] = next_pow2(gf.points_per_dim()[j] + gg.points_per_dim()[j]);
    lower[j] = gf.lower()[j] + gg.lower()[j];
    upper[j] = lower[j] + gf.spacing()[j] * static_cast<double>(out_n[j] - 1);
  }

  Eigen::Index pad_total = 1;
  for (auto n : pad_n)
    pad_total *= n;
  std::vector<std::complex<double>> a(pad_total), b(pad_total);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    auto mi = gf.multi_index(i);
    Eigen::Index flat = 0;
    for (int j = 0; j < d; ++j)
      flat = flat * pad_n[j] + mi[j];
    a[flat] = f.values[i];
  }
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    auto mi = gg.multi_index(i);
    Eigen::Index flat = 0;
    for (int j = 0; j < d; ++j)
      flat = flat * pad_n[j] + mi[j];
    b[flat] = g.values[i];
  }

  fft_nd(a, pad_n, false);
  fft_nd(b, pad_n, false);
  for (Eigen::Index i = 0; i < pad_total; ++i)
    a[i] *= b[i];
  fft_nd(a, pad_n, true);

  UniformGrid out_grid(lower, upper, out_n);
  Eigen::ArrayXd values(out_grid.total_points());
  const double cell = gf.cell_volume();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    auto mi = out_grid.multi_index(i);
    Eigen::Index flat = 0;
    for (int j = 0; j < d; ++j)
      flat = flat * pad_n[j] + mi[j];
    values[i] = a[flat].real() * cell;
  }
  GriddedFunction result(std::move(out_grid), std::move(values));
  result.check_finite("convolve");
  return result;
}

GriddedFunction convolve_direct(const GriddedFunction& f,
                                const GriddedFunction& g)
{
  const auto& gf = f.grid;
  const auto& gg = g.grid;
  if (!gf.same_spacing(gg))
    throw IncompatibleGrid("convolve_direct: grids must share spacing");
  const int d = gf.dim();

  std::vector<Eigen::Index> out_n(d);
  std::vector<double> lower(d), upper(d);
  for (int j = 0; j < d; ++j) {
    out_n[j] = gf.points_per_dim()[j] + gg.points_per_dim()[j] - 1;
    lower[j] = gf.lower()[j] + gg.lower()[j];
    upper[j] = lower[j] + gf.spacing()[j] * static_cast<double>(out_n[j] - 1);
  }
  UniformGrid out_grid(lower, upper, out_n);
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(out_grid.total_points());
  const double cell = gf.cell_volume();

  std::vector<Eigen::Index> mi_out(d);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    auto mi_f = gf.multi_index(i);
    for (Eigen::Index k = 0; k < g.values.size(); ++k) {
      auto mi_g = gg.multi_index(k);
      for (int j = 0; j < d; ++j)
        mi_out[j] = mi_f[j] + mi_g[j];
      values[out_grid.flat_index(mi_out)] += f.values[i] * g.values[k] * cell;
    }
  }
  return GriddedFunction(std::move(out_grid), std::move(values));
}

namespace {

GriddedFunction first_difference(const GriddedFunction& f, Eigen::Index steps,
                                 int axis)
{
  const auto& g = f.grid;
  const int d = g.dim();
  const Eigen::Index shift = std::abs(steps);
  if (g.points_per_dim()[axis] <= shift)
    throw InvalidStep("finite_difference: stencil exceeds grid extent");

  std::vector<Eigen::Index> out_n = g.points_per_dim();
  out_n[axis] -= shift;
  std::vector<double> lower = g.lower();
  std::vector<double> upper = g.upper();
  if (steps >= 0)
    upper[axis] -= g.spacing()[axis] * static_cast<double>(shift);
  else
    lower[axis] += g.spacing()[axis] * static_cast<double>(shift);
  UniformGrid out_grid(lower, upper, out_n);

  Eigen::ArrayXd values(out_grid.total_points());
  const Eigen::Index base_off = steps >= 0 ? 0 : shift;
  std::vector<Eigen::Index> mi(d);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mi = out_grid.multi_index(i);
    mi[axis] += base_off;
    const Eigen::Index at = g.flat_index(mi);
    mi[axis] += steps;
    const Eigen::Index shifted = g.flat_index(mi);
    mi[axis] -= steps;
    values[i] = f.values[shifted] - f.values[at];
  }
  return GriddedFunction(std::move(out_grid), std::move(values));
}

} // namespace

GriddedFunction finite_difference(const GriddedFunction& f, double u, int axis,
                                  int order)
{
  if (order < 1)
    throw InvalidParameter("finite_difference: order must be >= 1");
  if (axis < 0 || axis >= f.grid.dim())
    throw InvalidParameter("finite_difference: axis out of range");
  const double spacing = f.grid.spacing()[axis];
  const double ratio = u / spacing;
  const auto steps = static_cast<Eigen::Index>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9)
    throw InvalidStep("finite_difference: step not a multiple of spacing");

  // k-fold composition of first differences, exact by construction.
  GriddedFunction result = first_difference(f, steps, axis);
  for (int k = 1; k < order; ++k)
    result = first_difference(result, steps, axis);
  return result;
}

GriddedFunction restrict_to(const GriddedFunction& f, const UniformGrid& target)
{
  const auto& g = f.grid;
  if (!g.same_spacing(target))
    throw IncompatibleGrid("restrict_to: grids must share spacing");
  const int d = g.dim();
  std::vector<Eigen::Index> offset(d);
  for (int j = 0; j < d; ++j) {
    const double off = (target.lower()[j] - g.lower()[j]) / g.spacing()[j];
    offset[j] = static_cast<Eigen::Index>(std::llround(off));
    if (std::abs(off - static_cast<double>(offset[j])) > 1e-6 ||
        offset[j] < 0 ||
        offset[j] + target.points_per_dim()[j] > g.points_per_dim()[j])
      throw IncompatibleGrid("restrict_to: target nodes must lie on the grid");
  }
  Eigen::ArrayXd values(target.total_points());
  std::vector<Eigen::Index> mi(d);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    mi = target.multi_index(i);
    for (int j = 0; j < d; ++j)
      mi[j] += offset[j];
    values[i] = f.values[g.flat_index(mi)];
  }
  return GriddedFunction(target, std::move(values));
}

} // namespace adaptkde::numerics

#pragma once

#include "errors.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adaptkde {

//! Uniform rectangular grid over a box in R^d. Node j along axis a sits at
//! lower[a] + j * spacing[a]; the last node is exactly upper[a].
class UniformGrid
{
public:
  UniformGrid(std::vector<double> lower,
              std::vector<double> upper,
              std::vector<Eigen::Index> points_per_dim);

  //! Symmetric box [-half_width, half_width]^d with n points per axis.
  static UniformGrid centered(int dim, double half_width, Eigen::Index n);

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Eigen::Index>& points_per_dim() const { return npoints_; }
  const std::vector<double>& spacing() const { return spacing_; }

  Eigen::Index total_points() const;
  double cell_volume() const;

  //! Coordinate of node `idx` along axis `axis`.
  double coord(int axis, Eigen::Index idx) const
  {
    return lower_[axis] + spacing_[axis] * static_cast<double>(idx);
  }

  //! Row-major multi-index -> flat index.
  Eigen::Index flat_index(const std::vector<Eigen::Index>& mi) const;
  //! Flat index -> row-major multi-index.
  std::vector<Eigen::Index> multi_index(Eigen::Index flat) const;
  //! Coordinates of the node with flat index `flat`.
  std::vector<double> node(Eigen::Index flat) const;

  bool same_spacing(const UniformGrid& other, double rtol = 1e-9) const;

  bool operator==(const UniformGrid& other) const;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Eigen::Index> npoints_;
  std::vector<double> spacing_;
};

//! Real function sampled on a UniformGrid; values stored row-major.
struct GriddedFunction
{
  GriddedFunction(UniformGrid g, Eigen::ArrayXd v);
  //! Zero-initialized values.
  explicit GriddedFunction(UniformGrid g);

  UniformGrid grid;
  Eigen::ArrayXd values;

  //! Riemann-sum integral over the grid box.
  double integral() const { return values.sum() * grid.cell_volume(); }
  //! Throws InvalidParameter if any value is NaN or infinite.
  void check_finite(const std::string& context) const;
};

//! i.i.d. observations in R^d, stored row-major (n x d).
struct Sample
{
  Sample(int dim, std::vector<double> data);

  int dim;
  std::vector<double> data;

  Eigen::Index size() const
  {
    return static_cast<Eigen::Index>(data.size()) / dim;
  }
  const double* point(Eigen::Index i) const { return data.data() + i * dim; }
};

//! CSV serialization: header `# grid: d,lower...,upper...,points...`,
//! then one value per line in row-major order.
void write_csv(std::ostream& os, const GriddedFunction& f,
               const std::string& extra_header = "");
GriddedFunction read_gridded_csv(std::istream& is);

void write_sample_csv(std::ostream& os, const Sample& s);
Sample read_sample_csv(std::istream& is, int dim);

} // namespace adaptkde

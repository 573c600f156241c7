#include "adaptkde/grid.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace adaptkde {

UniformGrid::UniformGrid(std::vector<double> lower,
                         std::vector<double> upper,
                         std::vector<Eigen::Index> points_per_dim)
  : lower_(std::move(lower))
  , upper_(std::move(upper))
  , npoints_(std::move(points_per_dim))
{
  const auto d = lower_.size();
  if (d == 0 || upper_.size() != d || npoints_.size() != d)
    throw InvalidParameter("UniformGrid: dimension mismatch");
  spacing_.resize(d);
  for (size_t j = 0; j < d; ++j) {
    if (!(lower_[j] < upper_[j]))
      throw InvalidParameter("UniformGrid: lower must be below upper");
    if (npoints_[j] < 2)
      throw InvalidParameter("UniformGrid: need at least 2 points per axis");
    spacing_[j] = (upper_[j] - lower_[j]) / static_cast<double>(npoints_[j] - 1);
  }
}

UniformGrid UniformGrid::centered(int dim, double half_width, Eigen::Index n)
{
  return UniformGrid(std::vector<double>(dim, -half_width),
                     std::vector<double>(dim, half_width),
                     std::vector<Eigen::Index>(dim, n));
}

Eigen::Index UniformGrid::total_points() const
{
  Eigen::Index total = 1;
  for (auto n : npoints_)
    total *= n;
  return total;
}

double UniformGrid::cell_volume() const
{
  double v = 1.0;
  for (double s : spacing_)
    v *= s;
  return v;
}

Eigen::Index UniformGrid::flat_index(const std::vector<Eigen::Index>& mi) const
{
  Eigen::Index flat = 0;
  for (size_t j = 0; j < npoints_.size(); ++j)
    flat = flat * npoints_[j] + mi[j];
  return flat;
}

std::vector<Eigen::Index> UniformGrid::multi_index(Eigen::Index flat) const
{
  std::vector<Eigen::Index> mi(npoints_.size());
  for (size_t j = npoints_.size(); j-- > 0;) {
    mi[j] = flat % npoints_[j];
    flat /= npoints_[j];
  }
  return mi;
}

std::vector<double> UniformGrid::node(Eigen::Index flat) const
{
  auto mi = multi_index(flat);
  std::vector<double> x(mi.size());
  for (size_t j = 0; j < mi.size(); ++j)
    x[j] = coord(static_cast<int>(j), mi[j]);
  return x;
}

bool UniformGrid::same_spacing(const UniformGrid& other, double rtol) const
{
  if (dim() != other.dim())
    return false;
  for (int j = 0; j < dim(); ++j)
    if (std::abs(spacing_[j] - other.spacing_[j]) > rtol * spacing_[j])
      return false;
  return true;
}

bool UniformGrid::operator==(const UniformGrid& other) const
{
  return lower_ == other.lower_ && upper_ == other.upper_ &&
         npoints_ == other.npoints_;
}

GriddedFunction::GriddedFunction(UniformGrid g, Eigen::ArrayXd v)
  : grid(std::move(g))
  , values(std::move(v))
{
  if (values.size() != grid.total_points())
    throw InvalidParameter("GriddedFunction: value count does not match grid");
}

GriddedFunction::GriddedFunction(UniformGrid g)
  : grid(std::move(g))
  , values(Eigen::ArrayXd::Zero(grid.total_points()))
{
}

void GriddedFunction::check_finite(const std::string& context) const
{
  if (!values.isFinite().all())
    throw InvalidParameter("non-finite values after " + context);
}

Sample::Sample(int d, std::vector<double> pts)
  : dim(d)
  , data(std::move(pts))
{
  if (dim < 1 || data.empty() || data.size() % static_cast<size_t>(dim) != 0)
    throw InvalidParameter("Sample: data size must be a positive multiple of dim");
}

void write_csv(std::ostream& os, const GriddedFunction& f,
               const std::string& extra_header)
{
  const auto& g = f.grid;
  os << std::setprecision(17);
  os << "# grid: " << g.dim();
  for (int j = 0; j < g.dim(); ++j)
    os << "," << g.lower()[j];
  for (int j = 0; j < g.dim(); ++j)
    os << "," << g.upper()[j];
  for (int j = 0; j < g.dim(); ++j)
    os << "," << g.points_per_dim()[j];
  os << "\n";
  if (!extra_header.empty())
    os << "# " << extra_header << "\n";
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    os << f.values[i] << "\n";
}

GriddedFunction read_gridded_csv(std::istream& is)
{
  std::string line;
  if (!std::getline(is, line) || line.rfind("# grid: ", 0) != 0)
    throw InvalidParameter("gridded CSV: missing `# grid:` header");
  std::stringstream header(line.substr(8));
  std::string tok;
  std::vector<double> fields;
  while (std::getline(header, tok, ','))
    fields.push_back(std::stod(tok));
  if (fields.empty())
    throw InvalidParameter("gridded CSV: empty header");
  const int d = static_cast<int>(fields[0]);
  if (d < 1 || fields.size() != static_cast<size_t>(1 + 3 * d))
    throw InvalidParameter("gridded CSV: malformed header");
  std::vector<double> lower(fields.begin() + 1, fields.begin() + 1 + d);
  std::vector<double> upper(fields.begin() + 1 + d, fields.begin() + 1 + 2 * d);
  std::vector<Eigen::Index> npts(d);
  for (int j = 0; j < d; ++j)
    npts[j] = static_cast<Eigen::Index>(fields[1 + 2 * d + j]);
  UniformGrid grid(lower, upper, npts);
  Eigen::ArrayXd values(grid.total_points());
  Eigen::Index i = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (i >= values.size())
      throw InvalidParameter("gridded CSV: too many values");
    values[i++] = std::stod(line);
  }
  if (i != values.size())
    throw InvalidParameter("gridded CSV: too few values");
  return GriddedFunction(std::move(grid), std::move(values));
}

void write_sample_csv(std::ostream& os, const Sample& s)
{
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    for (int j = 0; j < s.dim; ++j)
      os << (j ? "," : "") << s.point(i)[j];
    os << "\n";
  }
}

Sample read_sample_csv(std::istream& is, int dim)
{
  std::vector<double> data;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::stringstream row(line);
    std::string tok;
    int got = 0;
    while (std::getline(row, tok, ',')) {
      data.push_back(std::stod(tok));
      ++got;
    }
    if (got != dim)
      throw InvalidParameter("sample CSV: wrong column count");
  }
  return Sample(dim, std::move(data));
}

} // namespace adaptkde

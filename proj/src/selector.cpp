#include "adaptkde/selector.hpp"

#include "adaptkde/numerics.hpp"

#include <cmath>
#include <ostream>
#include <utility>

namespace adaptkde::selector {

namespace {

const GriddedFunction& lookup(const EstimateMap& map,
                              const std::vector<double>& key,
                              const char* what)
{
  auto it = map.find(key);
  if (it == map.end())
    throw IncompleteFamily(std::string("selector: missing ") + what);
  return it->second;
}

UniformGrid deconv_kernel_grid(const UniformGrid& eval_grid)
{
  const int d = eval_grid.dim();
  std::vector<double> lower(d), upper(d);
  std::vector<Eigen::Index> npts(d);
  for (int j = 0; j < d; ++j) {
    const double width = eval_grid.upper()[j] - eval_grid.lower()[j];
    lower[j] = -width;
    upper[j] = width;
    npts[j] = 2 * eval_grid.points_per_dim()[j] - 1;
  }
  return UniformGrid(std::move(lower), std::move(upper), std::move(npts));
}

} // namespace

PairKey make_pair_key(const kernels::BandwidthVec& h,
                      const kernels::BandwidthVec& eta)
{
  if (eta.h() < h.h())
    return { eta.h(), h.h() };
  return { h.h(), eta.h() };
}

double r_hat(const kernels::BandwidthVec& h, const bandwidths::DyadicGrid& grid,
             const EstimateMap& estimates, const PairMap& pair_estimates,
             const PsiMap& psi, double p)
{
  double sup = 0.0;
  for (const auto& eta : grid.members) {
    auto pit = pair_estimates.find(make_pair_key(h, eta));
    if (pit == pair_estimates.end())
      throw IncompleteFamily("selector: missing pairwise estimate");
    const auto& single = lookup(estimates, eta.h(), "candidate estimate");
    auto psit = psi.find(eta.h());
    if (psit == psi.end())
      throw IncompleteFamily("selector: missing majorant value");
    GriddedFunction diff(single.grid, pit->second.values - single.values);
    const double term = numerics::lp_norm(diff, p) - 2.0 * psit->second;
    sup = std::max(sup, term);
  }
  return std::max(sup, 0.0);
}

SelectorResult select(const bandwidths::DyadicGrid& grid,
                      const EstimateMap& estimates,
                      const PairMap& pair_estimates, const PsiMap& psi,
                      double p)
{
  if (grid.members.empty())
    throw EmptyGrid("select: empty candidate grid");

  SelectorResult result;
  result.table.reserve(grid.members.size());
  for (const auto& h : grid.members) {
    CriterionRow row;
    row.h = h;
    row.r_hat = r_hat(h, grid, estimates, pair_estimates, psi, p);
    auto psit = psi.find(h.h());
    if (psit == psi.end())
      throw IncompleteFamily("selector: missing majorant value");
    row.psi = psit->second;
    row.criterion = row.r_hat + 2.0 * row.psi;
    result.table.push_back(std::move(row));
  }

  // grid members are sorted by decreasing volume, so scanning for a strict
  // improvement implements the largest-V_h tie-break
  std::size_t best = 0;
  std::size_t n_minima = 1;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    if (result.table[i].criterion < result.table[best].criterion) {
      best = i;
      n_minima = 1;
    } else if (result.table[i].criterion == result.table[best].criterion) {
      ++n_minima;
    }
  }
  result.table[best].chosen = true;
  result.chosen = result.table[best].h;
  result.chosen_value = result.table[best].criterion;
  result.slack_used = 0.0;
  result.tie_break_applied = n_minima > 1;
  return result;
}

void write_csv(std::ostream& os, const SelectorResult& result,
               const std::string& extra_header)
{
  if (!extra_header.empty())
    os << "# " << extra_header << "\n";
  const int d = result.chosen.dim();
  for (int j = 0; j < d; ++j)
    os << "h_" << j + 1 << ",";
  os << "V_h,R_hat,Psi,criterion,chosen\n";
  os.precision(17);
  for (const auto& row : result.table) {
    for (int j = 0; j < d; ++j)
      os << row.h[j] << ",";
    os << row.h.volume() << "," << row.r_hat << "," << row.psi << ","
       << row.criterion << "," << (row.chosen ? 1 : 0) << "\n";
  }
}

ProblemSpec ProblemSpec::density()
{
  return ProblemSpec{};
}

ProblemSpec ProblemSpec::deconvolution(models::NoiseSpec g, double alpha)
{
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidParameter("ProblemSpec: alpha must lie in [0, 1]");
  ProblemSpec spec;
  spec.kind = Kind::deconvolution;
  spec.noise = std::move(g);
  spec.alpha = alpha;
  return spec;
}

ProblemSpec ProblemSpec::derivative(std::vector<int> m)
{
  for (int mj : m)
    if (mj < 0)
      throw InvalidParameter("ProblemSpec: derivative orders must be >= 0");
  ProblemSpec spec;
  spec.kind = Kind::derivative;
  spec.m = std::move(m);
  return spec;
}

estimators::EstimateRecord second_stage_estimate(
  const models::DatasetPair& data, const ProblemSpec& problem,
  const kernels::ProductKernel& K, const kernels::BandwidthVec& h,
  const UniformGrid& eval_grid, estimators::EvalMethod method,
  estimators::DeconvKernelCache* cache)
{
  switch (problem.kind) {
    case ProblemSpec::Kind::density:
      return estimators::kde(data.second_half, K, h, eval_grid, method,
                             estimators::HalfTag::second);
    case ProblemSpec::Kind::deconvolution: {
      const auto m_grid = deconv_kernel_grid(eval_grid);
      std::shared_ptr<const GriddedFunction> M;
      if (cache != nullptr)
        M = cache->get_or_build(K, h, *problem.noise, problem.alpha, m_grid);
      else
        M = std::make_shared<const GriddedFunction>(estimators::deconv_kernel(
          K, h, *problem.noise, problem.alpha, m_grid));
      return estimators::deconv_estimate(data.second_half, *M, h, eval_grid,
                                         method);
    }
    case ProblemSpec::Kind::derivative:
      return estimators::derivative_estimate(data.second_half, K, h,
                                             problem.m, eval_grid, method);
  }
  throw InvalidParameter("second_stage_estimate: unknown problem kind");
}

PipelineResult plugin_pipeline(const models::DatasetPair& data,
                               const ProblemSpec& problem,
                               const kernels::ProductKernel& K,
                               const bandwidths::DyadicGrid& grid,
                               const upper_functions::UpperFunctionConfig& cfg,
                               const UniformGrid& eval_grid,
                               estimators::EvalMethod method,
                               estimators::DeconvKernelCache* cache)
{
  if (problem.kind == ProblemSpec::Kind::derivative && !K.has_derivatives())
    throw UnsupportedOperation(
      "plugin_pipeline: derivative problem needs a smooth kernel");

  EstimateMap estimates;
  PairMap pair_estimates;
  PsiMap psi;
  for (const auto& h : grid.members) {
    estimates.emplace(h.h(),
                      estimators::kde(data.first_half, K, h, eval_grid,
                                      method, estimators::HalfTag::first)
                        .estimate);
    psi.emplace(h.h(),
                upper_functions::delta_m(data.first_half, K, h, eval_grid,
                                         cfg));
  }
  for (std::size_t i = 0; i < grid.members.size(); ++i) {
    for (std::size_t j = i; j < grid.members.size(); ++j) {
      const auto& h = grid.members[i];
      const auto& eta = grid.members[j];
      pair_estimates.emplace(
        make_pair_key(h, eta),
        estimators::kde_pair(data.first_half, K, h, eta, eval_grid, method,
                             estimators::HalfTag::first)
          .estimate);
    }
  }

  auto selection = select(grid, estimates, pair_estimates, psi, cfg.p);
  auto final_estimate = second_stage_estimate(data, problem, K,
                                              selection.chosen, eval_grid,
                                              method, cache);
  return PipelineResult{ std::move(selection), std::move(final_estimate) };
}

} // namespace adaptkde::selector

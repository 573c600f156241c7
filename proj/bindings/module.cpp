//! Python bindings for the main operations: model construction, sampling,
//! the selection pipeline, fixed-bandwidth estimation, rate formulas and
//! the smoothness-class checks.

#include "adaptkde/bench.hpp"
#include "adaptkde/numerics.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
namespace akde = adaptkde;

namespace {

akde::Sample to_sample(const py::array_t<double>& arr)
{
  const auto buf = arr.request();
  int dim = 1;
  if (buf.ndim == 2)
    dim = static_cast<int>(buf.shape[1]);
  else if (buf.ndim != 1)
    throw akde::InvalidParameter("sample array must be 1- or 2-dimensional");
  const auto* ptr = static_cast<const double*>(buf.ptr);
  std::vector<double> data(ptr, ptr + buf.size);
  return akde::Sample(dim, std::move(data));
}

py::array_t<double> to_array(const akde::GriddedFunction& f)
{
  const auto& n = f.grid.points_per_dim();
  std::vector<py::ssize_t> shape(n.begin(), n.end());
  py::array_t<double> out(shape);
  std::copy(f.values.data(), f.values.data() + f.values.size(),
            out.mutable_data());
  return out;
}

py::dict grid_dict(const akde::UniformGrid& grid)
{
  py::dict out;
  out["lower"] = grid.lower();
  out["upper"] = grid.upper();
  out["points"] = grid.points_per_dim();
  out["spacing"] = grid.spacing();
  return out;
}

akde::selector::ProblemSpec make_problem(
  const std::string& kind, const std::optional<akde::models::NoiseSpec>& noise,
  double alpha, const std::vector<int>& m)
{
  if (kind == "density")
    return akde::selector::ProblemSpec::density();
  if (kind == "deconvolution") {
    if (!noise)
      throw akde::InvalidParameter("deconvolution requires a noise spec");
    return akde::selector::ProblemSpec::deconvolution(*noise, alpha);
  }
  if (kind == "derivative")
    return akde::selector::ProblemSpec::derivative(m);
  throw akde::InvalidParameter("unknown problem kind: " + kind);
}

} // namespace

PYBIND11_MODULE(_core, mod)
{
  mod.doc() = "Data-driven bandwidth selection by pairwise estimator "
              "comparison";

  py::register_exception<akde::InvalidParameter>(mod, "InvalidParameter",
                                                 PyExc_ValueError);
  py::register_exception<akde::EmptyGrid>(mod, "EmptyGrid", PyExc_ValueError);
  py::register_exception<akde::IllPosedModel>(mod, "IllPosedModel",
                                              PyExc_ValueError);
  py::register_exception<akde::OutOfValidity>(mod, "OutOfValidity",
                                              PyExc_ValueError);
  py::register_exception<akde::UnsupportedOperation>(mod,
                                                     "UnsupportedOperation",
                                                     PyExc_ValueError);

  py::class_<akde::models::DensitySpec>(mod, "DensitySpec")
    .def_static(
      "gaussian_mixture",
      [](const std::vector<
        std::tuple<double, std::vector<double>, std::vector<double>>>& comps) {
        std::vector<akde::models::DensitySpec::GaussianComponent> cs;
        for (const auto& [w, mean, scale] : comps)
          cs.push_back({ w, mean, scale });
        return akde::models::DensitySpec::gaussian_mixture(std::move(cs));
      },
      py::arg("components"),
      "Mixture from (weight, mean, scale) tuples.")
    .def_static("product_laplace", &akde::models::DensitySpec::product_laplace,
                py::arg("dim"), py::arg("scale"))
    .def_static("bessel_k", &akde::models::DensitySpec::bessel_k,
                py::arg("shape"))
    .def_property_readonly("dim", &akde::models::DensitySpec::dim)
    .def("pdf",
         [](const akde::models::DensitySpec& f, std::vector<double> x) {
           if (static_cast<int>(x.size()) != f.dim())
             throw akde::InvalidParameter("pdf: dimension mismatch");
           return f.eval(x.data());
         },
         py::arg("x"));

  py::class_<akde::models::NoiseSpec>(mod, "NoiseSpec")
    .def_static("gaussian", &akde::models::NoiseSpec::gaussian, py::arg("dim"),
                py::arg("sigma"))
    .def_static("laplace", &akde::models::NoiseSpec::laplace, py::arg("dim"),
                py::arg("scale"))
    .def_static("gamma", &akde::models::NoiseSpec::gamma, py::arg("dim"),
                py::arg("shape"), py::arg("rate"), py::arg("centered") = true)
    .def_property_readonly("dim", &akde::models::NoiseSpec::dim);

  py::class_<akde::kernels::ProductKernel>(mod, "ProductKernel")
    .def_static(
      "order_s",
      [](int dim, const std::string& base, int s) {
        const auto b = base == "bump" ? akde::kernels::BaseDensity::bump
                                      : akde::kernels::BaseDensity::gaussian;
        if (base != "bump" && base != "gaussian")
          throw akde::InvalidParameter("unknown kernel base: " + base);
        return akde::kernels::ProductKernel::order_s(dim, b, s);
      },
      py::arg("dim"), py::arg("base"), py::arg("s"))
    .def_static("band_limited", &akde::kernels::ProductKernel::band_limited,
                py::arg("dim"))
    .def_property_readonly("dim", &akde::kernels::ProductKernel::dim)
    .def("norm", &akde::kernels::ProductKernel::norm, py::arg("p"));

  mod.def(
    "sample_contaminated",
    [](const akde::models::DensitySpec& f, const akde::models::NoiseSpec& g,
       double alpha, Eigen::Index n, std::uint64_t seed,
       std::uint64_t replication) {
      const auto data = akde::models::sample_contaminated(
        f, g, akde::models::ContaminationSpec(alpha), n, seed, replication);
      auto pack = [&](const akde::Sample& s) {
        py::array_t<double> out({ s.size(),
                                  static_cast<Eigen::Index>(s.dim) });
        std::copy(s.data.begin(), s.data.end(), out.mutable_data());
        return out;
      };
      return py::make_tuple(pack(data.first_half), pack(data.second_half));
    },
    py::arg("density"), py::arg("noise"), py::arg("alpha"), py::arg("n"),
    py::arg("seed"), py::arg("replication") = 0,
    "Contaminated observations split into selection and estimation halves.");

  mod.def(
    "dyadic_grid",
    [](Eigen::Index m, int dim, bool isotropic) {
      const auto grid = akde::bandwidths::build_grid(
        m, dim,
        isotropic ? akde::bandwidths::GridMode::isotropic
                  : akde::bandwidths::GridMode::full);
      std::vector<std::vector<double>> out;
      for (const auto& h : grid.members)
        out.push_back(h.h());
      return out;
    },
    py::arg("m"), py::arg("dim"), py::arg("isotropic") = false,
    "Dyadic bandwidth candidates, sorted by decreasing volume.");

  mod.def(
    "kde",
    [](const py::array_t<double>& sample,
       const akde::kernels::ProductKernel& K, const std::vector<double>& h,
       double half_width, Eigen::Index points, const std::string& method) {
      const auto s = to_sample(sample);
      const auto grid = akde::UniformGrid::centered(s.dim, half_width, points);
      const auto rec = akde::estimators::kde(
        s, K, akde::kernels::BandwidthVec(h), grid,
        method == "direct" ? akde::estimators::EvalMethod::direct
                           : akde::estimators::EvalMethod::binned_fft);
      py::dict out;
      out["grid"] = grid_dict(grid);
      out["values"] = to_array(rec.estimate);
      return out;
    },
    py::arg("sample"), py::arg("kernel"), py::arg("h"),
    py::arg("half_width") = 8.0, py::arg("points") = 1025,
    py::arg("method") = "binned_fft");

  mod.def(
    "select",
    [](const py::array_t<double>& first, const py::array_t<double>& second,
       const akde::kernels::ProductKernel& K, const std::string& problem,
       const std::optional<akde::models::NoiseSpec>& noise, double alpha,
       const std::vector<int>& derivative_m, double p, double c_scale,
       double half_width, Eigen::Index points, bool isotropic) {
      const auto a = to_sample(first);
      const auto b = to_sample(second);
      akde::models::DatasetPair data{ a, b, a.size() + b.size(), 0, 0 };
      const auto grid = akde::bandwidths::build_grid(
        a.size(), a.dim,
        isotropic ? akde::bandwidths::GridMode::isotropic
                  : akde::bandwidths::GridMode::full);
      const auto cfg =
        akde::upper_functions::UpperFunctionConfig::for_kernel(K, p, c_scale);
      const auto eval_grid =
        akde::UniformGrid::centered(a.dim, half_width, points);
      const auto spec = make_problem(problem, noise, alpha, derivative_m);
      const auto run = akde::selector::plugin_pipeline(data, spec, K, grid,
                                                       cfg, eval_grid);
      py::list table;
      for (const auto& row : run.selection.table) {
        py::dict r;
        r["h"] = row.h.h();
        r["V_h"] = row.h.volume();
        r["R_hat"] = row.r_hat;
        r["Psi"] = row.psi;
        r["criterion"] = row.criterion;
        r["chosen"] = row.chosen;
        table.append(r);
      }
      py::dict out;
      out["chosen"] = run.selection.chosen.h();
      out["criterion"] = run.selection.chosen_value;
      out["tie_break_applied"] = run.selection.tie_break_applied;
      out["table"] = table;
      out["grid"] = grid_dict(eval_grid);
      out["estimate"] = to_array(run.final_estimate.estimate);
      return out;
    },
    py::arg("first_half"), py::arg("second_half"), py::arg("kernel"),
    py::arg("problem") = "density", py::arg("noise") = std::nullopt,
    py::arg("alpha") = 0.0, py::arg("derivative_m") = std::vector<int>{},
    py::arg("p") = 2.0, py::arg("c_scale") = 1.0, py::arg("half_width") = 8.0,
    py::arg("points") = 1025, py::arg("isotropic") = false,
    "Run the full selection pipeline and the second-stage estimate.");

  mod.def(
    "theoretical_rate",
    [](const std::string& problem, const std::vector<double>& beta,
       const std::vector<int>& m, double p) {
      akde::bench::RateProblem tag;
      if (problem == "density")
        tag = akde::bench::RateProblem::density;
      else if (problem == "derivative")
        tag = akde::bench::RateProblem::derivative;
      else if (problem == "sobolev_deconv_A")
        tag = akde::bench::RateProblem::sobolev_deconv_A;
      else if (problem == "sobolev_deconv_B")
        tag = akde::bench::RateProblem::sobolev_deconv_B;
      else
        throw akde::InvalidParameter("unknown rate problem: " + problem);
      const auto rate = akde::bench::theoretical_rate(tag, beta, m, p);
      py::dict out;
      out["n_exponent"] = rate.n_exponent;
      out["L_exponent"] = rate.L_exponent;
      out["source"] = rate.source;
      return out;
    },
    py::arg("problem"), py::arg("beta"), py::arg("m") = std::vector<int>{},
    py::arg("p") = 2.0);

  mod.def(
    "nikolskii_check",
    [](const py::array_t<double>& values, double half_width,
       const std::vector<double>& beta, double L, double p,
       const std::vector<int>& k) {
      const auto buf = values.request();
      const auto grid = akde::UniformGrid::centered(
        static_cast<int>(buf.ndim), half_width, buf.shape[0]);
      Eigen::ArrayXd v = Eigen::Map<const Eigen::ArrayXd>(
        static_cast<const double*>(buf.ptr), buf.size);
      const auto res = akde::bench::nikolskii_check(
        akde::GriddedFunction(grid, std::move(v)),
        akde::bench::SmoothnessSpec::nikolskii(beta, L, p, k));
      py::dict out;
      out["max_ratio"] = res.max_ratio;
      out["norm_value"] = res.norm_value;
      out["passes"] = res.passes;
      return out;
    },
    py::arg("values"), py::arg("half_width"), py::arg("beta"), py::arg("L"),
    py::arg("p"), py::arg("k"));

  mod.def(
    "sobolev_check",
    [](const py::array_t<double>& values, double half_width, double beta1,
       double L) {
      const auto buf = values.request();
      if (buf.ndim != 1)
        throw akde::UnsupportedOperation("sobolev_check: d = 1 only");
      const auto grid =
        akde::UniformGrid::centered(1, half_width, buf.shape[0]);
      Eigen::ArrayXd v = Eigen::Map<const Eigen::ArrayXd>(
        static_cast<const double*>(buf.ptr), buf.size);
      const auto res = akde::bench::sobolev_check(
        akde::GriddedFunction(grid, std::move(v)), beta1, L);
      py::dict out;
      out["integral_value"] = res.integral_value;
      out["passes"] = res.passes;
      return out;
    },
    py::arg("values"), py::arg("half_width"), py::arg("beta1"), py::arg("L"));
}

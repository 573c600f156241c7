//! Batch experiment runner: configuration parsing, pipeline dispatch and
//! result emission.

#include "adaptkde/bench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;
namespace akde = adaptkde;
namespace fs = std::filesystem;

//! Strict schema: any key outside `allowed` is a configuration error.
void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context)
{
  if (!j.is_object())
    throw akde::InvalidParameter("config: " + context + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw akde::InvalidParameter("config: unknown key \"" + key + "\" in " +
                                   context);
}

const json& require(const json& j, const std::string& key,
                    const std::string& context)
{
  auto it = j.find(key);
  if (it == j.end())
    throw akde::InvalidParameter("config: missing key \"" + key + "\" in " +
                                 context);
  return *it;
}

std::uint64_t fnv1a64(const std::string& s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

akde::models::DensitySpec parse_density(const json& j)
{
  check_keys(j, { "form", "components", "dim", "scale", "shape" },
             "model.density");
  const std::string form = require(j, "form", "model.density");
  if (form == "gaussian_mixture") {
    std::vector<akde::models::DensitySpec::GaussianComponent> comps;
    for (const auto& c : require(j, "components", "model.density")) {
      check_keys(c, { "weight", "mean", "scale" }, "mixture component");
      comps.push_back({ require(c, "weight", "component").get<double>(),
                        require(c, "mean", "component")
                          .get<std::vector<double>>(),
                        require(c, "scale", "component")
                          .get<std::vector<double>>() });
    }
    return akde::models::DensitySpec::gaussian_mixture(std::move(comps));
  }
  if (form == "product_laplace")
    return akde::models::DensitySpec::product_laplace(
      require(j, "dim", "model.density").get<int>(),
      require(j, "scale", "model.density").get<double>());
  if (form == "bessel_k")
    return akde::models::DensitySpec::bessel_k(
      require(j, "shape", "model.density").get<double>());
  throw akde::InvalidParameter("config: unknown density form \"" + form +
                               "\"");
}

akde::models::NoiseSpec parse_noise(const json& j, int dim)
{
  check_keys(j, { "family", "sigma", "scale", "shape", "rate" },
             "model.noise");
  const std::string family = require(j, "family", "model.noise");
  if (family == "gaussian")
    return akde::models::NoiseSpec::gaussian(
      dim, require(j, "sigma", "model.noise").get<double>());
  if (family == "laplace")
    return akde::models::NoiseSpec::laplace(
      dim, require(j, "scale", "model.noise").get<double>());
  if (family == "gamma")
    return akde::models::NoiseSpec::gamma(
      dim, require(j, "shape", "model.noise").get<double>(),
      require(j, "rate", "model.noise").get<double>());
  throw akde::InvalidParameter("config: unknown noise family \"" + family +
                               "\"");
}

akde::kernels::ProductKernel parse_kernel(const json& j, int dim)
{
  check_keys(j, { "family", "base", "s" }, "kernel");
  const std::string family = require(j, "family", "kernel");
  if (family == "band_limited")
    return akde::kernels::ProductKernel::band_limited(dim);
  if (family == "order_s") {
    const std::string base = require(j, "base", "kernel");
    akde::kernels::BaseDensity b;
    if (base == "gaussian")
      b = akde::kernels::BaseDensity::gaussian;
    else if (base == "bump")
      b = akde::kernels::BaseDensity::bump;
    else
      throw akde::InvalidParameter("config: unknown kernel base \"" + base +
                                   "\"");
    return akde::kernels::ProductKernel::order_s(
      dim, b, require(j, "s", "kernel").get<int>());
  }
  throw akde::InvalidParameter("config: unknown kernel family \"" + family +
                               "\"");
}

struct Config
{
  json raw;
  std::string hash_hex;

  akde::bench::ExperimentSpec experiment;
  akde::bench::RiskConfig risk;
  Eigen::Index n = 0; //!< single-run sample size (simulate/select)
  double rate_tolerance = 0.08;
  std::optional<akde::bench::RatePair> rate;
  std::optional<akde::bench::SmoothnessSpec> smoothness;
  std::vector<int> class_m; //!< multi-index for the embedding check
};

akde::bench::RatePair parse_rate(const json& j, double p)
{
  check_keys(j, { "problem", "beta", "m" }, "rate");
  const std::string problem = require(j, "problem", "rate");
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
    throw akde::InvalidParameter("config: unknown rate problem \"" + problem +
                                 "\"");
  std::vector<int> m;
  if (j.contains("m"))
    m = j["m"].get<std::vector<int>>();
  return akde::bench::theoretical_rate(
    tag, require(j, "beta", "rate").get<std::vector<double>>(), m, p);
}

akde::bench::SmoothnessSpec parse_smoothness(const json& j)
{
  check_keys(j, { "kind", "beta", "L", "p", "k", "beta1" }, "smoothness");
  const std::string kind = require(j, "kind", "smoothness");
  if (kind == "nikolskii")
    return akde::bench::SmoothnessSpec::nikolskii(
      require(j, "beta", "smoothness").get<std::vector<double>>(),
      require(j, "L", "smoothness").get<double>(),
      require(j, "p", "smoothness").get<double>(),
      require(j, "k", "smoothness").get<std::vector<int>>());
  if (kind == "sobolev")
    return akde::bench::SmoothnessSpec::sobolev(
      require(j, "beta1", "smoothness").get<double>(),
      require(j, "L", "smoothness").get<double>());
  throw akde::InvalidParameter("config: unknown smoothness kind \"" + kind +
                               "\"");
}

Config load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw akde::InvalidParameter("cannot open config file: " + path);
  json j = json::parse(in);

  check_keys(j,
             { "problem", "model", "kernel", "derivative_m", "grid_mode",
               "loss_p", "risk_q", "c_scale", "sizes", "replications", "seed",
               "eval", "method", "n", "rate", "rate_tolerance", "smoothness",
               "class_m", "fixed_h" },
             "top level");

  std::string hash_hex;
  {
    std::ostringstream hex;
    hex << std::hex << fnv1a64(j.dump());
    hash_hex = hex.str();
  }

  const json& model = require(j, "model", "top level");
  check_keys(model, { "density", "noise", "alpha" }, "model");
  auto density = parse_density(require(model, "density", "model"));
  const int dim = density.dim();

  double alpha = 0.0;
  std::optional<akde::models::NoiseSpec> noise;
  if (model.contains("alpha"))
    alpha = model["alpha"].get<double>();
  if (model.contains("noise"))
    noise = parse_noise(model["noise"], dim);
  if (alpha > 0.0 && !noise)
    throw akde::InvalidParameter(
      "config: contamination alpha > 0 requires model.noise");

  auto kernel = parse_kernel(require(j, "kernel", "top level"), dim);

  const std::string problem = require(j, "problem", "top level");
  akde::selector::ProblemSpec pspec;
  if (problem == "density") {
    pspec = akde::selector::ProblemSpec::density();
  } else if (problem == "deconvolution") {
    if (!noise)
      throw akde::InvalidParameter(
        "config: deconvolution requires model.noise");
    if (!kernel.factor(0).has_fourier())
      throw akde::InvalidParameter(
        "config: deconvolution requires the band_limited kernel");
    pspec = akde::selector::ProblemSpec::deconvolution(*noise, alpha);
  } else if (problem == "derivative") {
    if (!kernel.has_derivatives())
      throw akde::InvalidParameter(
        "config: derivative estimation requires an order_s kernel");
    pspec = akde::selector::ProblemSpec::derivative(
      require(j, "derivative_m", "top level").get<std::vector<int>>());
  } else {
    throw akde::InvalidParameter("config: unknown problem \"" + problem +
                                 "\"");
  }

  auto grid_mode = akde::bandwidths::GridMode::full;
  if (j.contains("grid_mode")) {
    const std::string mode = j["grid_mode"];
    if (mode == "isotropic")
      grid_mode = akde::bandwidths::GridMode::isotropic;
    else if (mode != "full")
      throw akde::InvalidParameter("config: unknown grid_mode \"" + mode +
                                   "\"");
  }
  if (pspec.kind == akde::selector::ProblemSpec::Kind::derivative &&
      grid_mode == akde::bandwidths::GridMode::full && dim > 1) {
    bool equal = true;
    for (int mj : pspec.m)
      equal = equal && mj == pspec.m.front();
    if (!equal)
      throw akde::InvalidParameter(
        "config: unequal derivative orders require grid_mode=isotropic");
  }

  double half_width = 8.0;
  Eigen::Index points = 1025;
  if (j.contains("eval")) {
    check_keys(j["eval"], { "half_width", "points" }, "eval");
    if (j["eval"].contains("half_width"))
      half_width = j["eval"]["half_width"].get<double>();
    if (j["eval"].contains("points"))
      points = j["eval"]["points"].get<Eigen::Index>();
  }

  auto method = akde::estimators::EvalMethod::binned_fft;
  if (j.contains("method")) {
    const std::string m = j["method"];
    if (m == "direct")
      method = akde::estimators::EvalMethod::direct;
    else if (m != "binned_fft")
      throw akde::InvalidParameter("config: unknown method \"" + m + "\"");
  }

  Config cfg{ j,
              std::move(hash_hex),
              akde::bench::ExperimentSpec{
                std::move(density), std::move(noise), alpha, std::move(pspec),
                std::move(kernel), grid_mode, j.value("c_scale", 1.0),
                akde::UniformGrid::centered(dim, half_width, points), method,
                std::nullopt },
              {},
              0,
              0.08,
              std::nullopt,
              std::nullopt,
              {} };
  if (j.contains("fixed_h"))
    cfg.experiment.fixed_h =
      akde::kernels::BandwidthVec(j["fixed_h"].get<std::vector<double>>());

  cfg.risk.p = j.value("loss_p", 2.0);
  cfg.risk.q = j.value("risk_q", cfg.risk.p);
  cfg.risk.replications = j.value("replications", 100);
  if (j.contains("sizes"))
    cfg.risk.sizes = j["sizes"].get<std::vector<Eigen::Index>>();
  cfg.risk.seed = j.value("seed", std::uint64_t{ 0 });
  cfg.n = j.value("n", Eigen::Index{ 0 });
  cfg.rate_tolerance = j.value("rate_tolerance", 0.08);
  if (j.contains("rate"))
    cfg.rate = parse_rate(j["rate"], cfg.risk.p);
  if (j.contains("smoothness"))
    cfg.smoothness = parse_smoothness(j["smoothness"]);
  if (j.contains("class_m"))
    cfg.class_m = j["class_m"].get<std::vector<int>>();
  return cfg;
}

std::string stamp(const Config& cfg)
{
  std::ostringstream os;
  os.precision(17);
  os << "config_hash=" << cfg.hash_hex
     << " c_scale=" << cfg.experiment.c_scale;
  return os.str();
}

std::ofstream open_out(const fs::path& dir, const std::string& name)
{
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os)
    throw akde::InvalidParameter("cannot open output file: " +
                                 (dir / name).string());
  return os;
}

akde::GriddedFunction ground_truth(const Config& cfg)
{
  const auto& e = cfg.experiment;
  if (e.problem.kind == akde::selector::ProblemSpec::Kind::derivative) {
    akde::GriddedFunction target(e.eval_grid);
    for (Eigen::Index i = 0; i < target.values.size(); ++i) {
      const auto x = e.eval_grid.node(i);
      target.values[i] = e.density.derivative(x.data(), e.problem.m);
    }
    return target;
  }
  return e.density.on_grid(e.eval_grid);
}

int cmd_simulate(const Config& cfg, const fs::path& out, int /*jobs*/)
{
  if (cfg.n < 4)
    throw akde::InvalidParameter("simulate: config key \"n\" must be >= 4");
  const auto noise =
    cfg.experiment.noise
      ? *cfg.experiment.noise
      : akde::models::NoiseSpec::gaussian(cfg.experiment.density.dim(), 1.0);
  const auto data = akde::models::sample_contaminated(
    cfg.experiment.density, noise,
    akde::models::ContaminationSpec(cfg.experiment.alpha), cfg.n,
    cfg.risk.seed);
  auto first = open_out(out, "data_first.csv");
  first << "# " << stamp(cfg) << "\n";
  akde::write_sample_csv(first, data.first_half);
  auto second = open_out(out, "data_second.csv");
  second << "# " << stamp(cfg) << "\n";
  akde::write_sample_csv(second, data.second_half);
  std::cout << "wrote data_first.csv, data_second.csv (n=" << cfg.n << ")\n";
  return 0;
}

int cmd_select(const Config& cfg, const fs::path& out, int /*jobs*/)
{
  if (cfg.n < 4)
    throw akde::InvalidParameter("select: config key \"n\" must be >= 4");
  const auto& e = cfg.experiment;
  const auto noise = e.noise ? *e.noise
                             : akde::models::NoiseSpec::gaussian(
                                 e.density.dim(), 1.0);
  const auto data = akde::models::sample_contaminated(
    e.density, noise, akde::models::ContaminationSpec(e.alpha), cfg.n,
    cfg.risk.seed);
  const auto grid = akde::bandwidths::build_grid(cfg.n / 2, e.density.dim(),
                                                 e.grid_mode);
  const auto ucfg = akde::upper_functions::UpperFunctionConfig::for_kernel(
    e.kernel, cfg.risk.p, e.c_scale);
  auto result = akde::selector::plugin_pipeline(data, e.problem, e.kernel,
                                                grid, ucfg, e.eval_grid,
                                                e.method);
  auto sel = open_out(out, "selector.csv");
  akde::selector::write_csv(sel, result.selection, stamp(cfg));
  auto est = open_out(out, "estimate.csv");
  akde::write_csv(est, result.final_estimate.estimate, stamp(cfg));
  std::cout << "selected h = " << result.selection.chosen[0]
            << " (criterion " << result.selection.chosen_value << ")\n";
  return 0;
}

int cmd_risk(const Config& cfg, const fs::path& out, int jobs)
{
  const auto target = ground_truth(cfg);
  auto report = akde::bench::mc_risk(cfg.risk, cfg.experiment, target, jobs);
  if (cfg.rate) {
    report.theoretical_exponent = cfg.rate->n_exponent;
    report.rate_source = cfg.rate->source;
  }
  auto csv = open_out(out, "risk.csv");
  akde::bench::write_csv(csv, report, stamp(cfg));

  json summary;
  summary["config_hash"] = cfg.hash_hex;
  summary["c_scale"] = cfg.experiment.c_scale;
  if (cfg.rate) {
    const auto fit = akde::bench::rate_fit(report, cfg.rate_tolerance);
    summary["slope"] = fit.slope;
    summary["slope_stderr"] = fit.stderr_;
    summary["theoretical"] = fit.theoretical;
    summary["tolerance"] = fit.tolerance;
    summary["pass"] = fit.pass;
    summary["rate_source"] = report.rate_source;
  }
  auto js = open_out(out, "summary.json");
  js << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const Config& cfg, const fs::path& out, int jobs)
{
  const auto target = ground_truth(cfg);
  const auto rows =
    akde::bench::oracle_ratio(cfg.risk, cfg.experiment, target, jobs);
  auto csv = open_out(out, "oracle.csv");
  csv << "# " << stamp(cfg) << "\n";
  csv << "n,median_ratio,q90_ratio\n";
  csv.precision(17);
  for (const auto& row : rows)
    csv << row.n << "," << row.median_ratio << "," << row.q90_ratio << "\n";
  for (const auto& row : rows)
    std::cout << "n=" << row.n << " median=" << row.median_ratio
              << " q90=" << row.q90_ratio << "\n";
  return 0;
}

int cmd_check_class(const Config& cfg, const fs::path& out, int /*jobs*/)
{
  if (!cfg.smoothness)
    throw akde::InvalidParameter(
      "check-class: config key \"smoothness\" is required");
  const auto& e = cfg.experiment;
  const auto f = e.density.on_grid(e.eval_grid);

  json report;
  report["config_hash"] = cfg.hash_hex;
  if (cfg.smoothness->kind == akde::bench::SmoothnessSpec::Kind::nikolskii) {
    const auto nik = akde::bench::nikolskii_check(f, *cfg.smoothness);
    report["nikolskii"] = { { "max_ratio", nik.max_ratio },
                            { "norm_value", nik.norm_value },
                            { "passes", nik.passes } };
    if (!cfg.class_m.empty()) {
      const auto kol = akde::bench::kolmogorov_check(
        e.density, cfg.class_m, *cfg.smoothness, cfg.risk.p, e.eval_grid);
      report["kolmogorov"] = { { "lhs", kol.lhs },
                               { "rhs_without_constant",
                                 kol.rhs_without_constant },
                               { "ratio", kol.ratio } };
    }
  } else {
    const auto sob = akde::bench::sobolev_check(f, cfg.smoothness->beta1,
                                                cfg.smoothness->L);
    report["sobolev"] = { { "integral_value", sob.integral_value },
                          { "passes", sob.passes } };
  }
  auto js = open_out(out, "class_report.json");
  js << report.dump(2) << "\n";
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_rates(const Config& cfg, const fs::path& /*out*/, int /*jobs*/)
{
  if (!cfg.rate)
    throw akde::InvalidParameter("rates: config key \"rate\" is required");
  std::cout.precision(17);
  std::cout << "n_exponent=" << cfg.rate->n_exponent
            << " L_exponent=" << cfg.rate->L_exponent
            << " source=" << cfg.rate->source << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Adaptive bandwidth selection experiments" };
  app.require_subcommand(1);
  app.fallthrough(); // global options may follow the subcommand name

  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
  app.add_option("--config", config_path, "JSON config path")->required();
  app.add_option("--jobs", jobs, "max concurrent replications");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the config seed");

  struct Sub
  {
    const char* name;
    const char* help;
    int (*run)(const Config&, const fs::path&, int);
  };
  const Sub subs[] = {
    { "simulate", "emit a split observation set as CSV", cmd_simulate },
    { "select", "run the selection pipeline once", cmd_select },
    { "risk", "Monte Carlo risk and rate fit", cmd_risk },
    { "oracle", "selected-vs-best fixed bandwidth ratios", cmd_oracle },
    { "check-class", "smoothness class verification", cmd_check_class },
    { "rates", "print closed-form rate exponents", cmd_rates },
  };
  for (const auto& sub : subs)
    app.add_subcommand(sub.name, sub.help);

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = load_config(config_path);
    if (seed_override)
      cfg.risk.seed = *seed_override;
    for (const auto& sub : subs)
      if (app.get_subcommand(sub.name)->parsed())
        return sub.run(cfg, out_dir, jobs);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// mpsim: sample structured random matrices, compare their spectra to the
// Marchenko-Pastur law and run the verification suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mpsim/combinatorics.hpp"
#include "mpsim/experiment.hpp"

namespace {

using mpsim::Json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::filesystem::path output_dir(const std::string& flag, const std::filesystem::path& fallback) {
  if (const char* env = std::getenv(mpsim::kOutputDirEnv); env && *env) return env;
  return flag.empty() ? fallback : std::filesystem::path(flag);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit_report(const Json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

mpsim::Comparison comparison_from_flags(double lambda, double sigma2, const std::string& atoms) {
  if (atoms.empty()) return mpsim::MpComparison{lambda, sigma2};
  mpsim::AnisotropicComparison c{lambda, {}};
  Json parsed;
  try {
    parsed = Json::parse(atoms);
  } catch (const nlohmann::json::parse_error& e) {
    throw mpsim::ConfigError(std::string("--atoms: ") + e.what());
  }
  for (const auto& a : parsed) {
    if (!a.is_array() || a.size() != 2) throw mpsim::ConfigError("--atoms expects [[location, weight], ...]");
    c.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
  }
  try {
    mpsim::SpectralMixture check(c.atoms);
  } catch (const mpsim::MpLawError& e) {
    throw mpsim::ConfigError(std::string("--atoms: ") + e.what());
  }
  return c;
}

struct SimulateFlags {
  std::string config;
  std::string preset;
  std::string law;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> bins;
  std::optional<double> scale;
  std::optional<unsigned> threads;
  std::string output;
  bool full = false;
};

int print_simulation(const mpsim::ExperimentConfig& config) {
  const auto result = mpsim::run_simulate(config);
  std::cout << "name=" << config.name << " seed=" << config.seed << " p=" << result.p << " m=" << result.m
            << " ks=" << mpsim::format_double(result.ks_distance) << " wall=" << result.wall_seconds << "s -> "
            << config.output_dir.string() << "\n";
  return result.spectrum_residuals_ok ? kExitOk : kExitVerifyFailed;
}

int run_simulate_command(const SimulateFlags& f) {
  mpsim::ExperimentConfig config;
  if (!f.config.empty()) config = mpsim::load_config(f.config);
  const double scale = f.full ? 1.0 : f.scale.value_or(f.config.empty() ? 0.25 : config.scale_factor);
  if (!f.preset.empty()) {
    Json model{{"preset", f.preset}};
    if (!f.law.empty()) model["law"] = f.law;
    config.model = mpsim::parse_model(model, scale);
    config.comparison.reset();
    config.name = "figure" + f.preset;
  }
  config.scale_factor = scale;
  if (f.seed) config.seed = *f.seed;
  if (f.bins) config.histogram_bins = *f.bins;
  if (f.threads) config.threads = *f.threads;
  config.output_dir = output_dir(f.output, config.output_dir);
  return print_simulation(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured random matrices and the Marchenko-Pastur law"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mpsim 1.0.0");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Sample one matrix and compare its spectrum to the limit law");
  simulate->add_option("-c,--config", sim.config, "JSON experiment config")->check(CLI::ExistingFile);
  simulate->add_option("--preset", sim.preset, "Figure geometry (1a, 1b, 1c, 1d, 2, 3, 4)");
  simulate->add_option("--law", sim.law, "Entry law for tensor presets");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--bins", sim.bins, "Histogram bins")->check(CLI::PositiveNumber);
  simulate->add_option("--scale", sim.scale, "Scale factor in (0, 1]");
  simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--output-dir", sim.output, "Output directory");
  simulate->add_flag("--full", sim.full, "Use the full-size geometry");

  std::string figure_id;
  SimulateFlags fig;
  auto* figures = app.add_subcommand("figures", "Reproduce a figure experiment at desk scale");
  figures->add_option("id", figure_id, "1a, 1b, 1c, 1d, 2, 3 or 4")->required();
  figures->add_option("--law", fig.law, "Entry law for tensor figures (rademacher, uniform, normal, all)");
  figures->add_option("--seed", fig.seed, "Master seed");
  figures->add_option("--bins", fig.bins, "Histogram bins")->check(CLI::PositiveNumber);
  figures->add_option("--scale", fig.scale, "Scale factor in (0, 1]");
  figures->add_option("--threads", fig.threads, "Worker threads")->check(CLI::PositiveNumber);
  figures->add_option("-o,--output-dir", fig.output, "Output directory");
  figures->add_flag("--full", fig.full, "Use the full-size geometry");

  double lambda = 0.25, sigma2 = 1.0, x_min = 0.0, x_max = 4.0, eta = 1e-6;
  std::size_t points = 1000;
  std::string atoms, density_out, quantity = "density";
  auto* density = app.add_subcommand("density", "Tabulate the limiting density or CDF on a grid");
  density->add_option("--lambda", lambda, "Aspect ratio p/m")->check(CLI::PositiveNumber);
  density->add_option("--sigma2", sigma2, "Entry variance")->check(CLI::PositiveNumber);
  density->add_option("--atoms", atoms, "Population spectrum as [[t, w], ...]");
  density->add_option("--x-min", x_min, "Grid start");
  density->add_option("--x-max", x_max, "Grid end");
  density->add_option("--points", points, "Grid points");
  density->add_option("--eta", eta, "Imaginary offset for Stieltjes inversion")->check(CLI::PositiveNumber);
  density->add_option("--quantity", quantity, "density or cdf")->check(CLI::IsMember({"density", "cdf"}));
  density->add_option("-o,--output", density_out, "CSV file (stdout when omitted)");

  std::string vc_model = "1a", vc_config, vc_out;
  double vc_scale = 0.25;
  std::size_t vc_samples = 10000, vc_matrices = 3;
  std::uint64_t vc_seed = mpsim::kDefaultSeed;
  unsigned vc_threads = 1;
  auto* varcheck = app.add_subcommand("varcheck", "Monte Carlo variance of quadratic forms against the bounds");
  varcheck->add_option("--model", vc_model, "Figure preset");
  varcheck->add_option("-c,--config", vc_config, "JSON config whose model is used")->check(CLI::ExistingFile);
  varcheck->add_option("--scale", vc_scale, "Scale factor in (0, 1]");
  varcheck->add_option("--samples", vc_samples, "Monte Carlo samples");
  varcheck->add_option("--matrices", vc_matrices, "Number of test matrices A")->check(CLI::PositiveNumber);
  varcheck->add_option("--seed", vc_seed, "Master seed");
  varcheck->add_option("--threads", vc_threads, "Worker threads")->check(CLI::PositiveNumber);
  mpsim::TensorBoundConstants vc_constants;
  varcheck->add_option("--bound-constant", vc_constants.big_c, "Tensor bound prefactor C")
      ->check(CLI::PositiveNumber);
  varcheck->add_option("--bound-cutoff", vc_constants.small_c, "Tensor bound applies while sqrt(K) d / n^(1/3) < c")
      ->check(CLI::PositiveNumber);
  varcheck->add_option("-o,--output", vc_out, "JSON report file (stdout when omitted)");

  unsigned census_n = 6, census_d = 2, census_threads = 1;
  std::string census_out;
  auto* census = app.add_subcommand("census", "Exact (w, v, r) census of index 4-tuples as CSV");
  census->add_option("--n", census_n, "Ground set size")->check(CLI::Range(1, 63));
  census->add_option("--d", census_d, "Subset size")->check(CLI::PositiveNumber);
  census->add_option("--threads", census_threads, "Worker threads")->check(CLI::PositiveNumber);
  census->add_option("-o,--output", census_out, "CSV file (stdout when omitted)");

  std::string lemmas_out;
  auto* lemmas = app.add_subcommand("lemmas", "Exact checks of the binomial inequalities");
  lemmas->add_option("-o,--output", lemmas_out, "JSON report file (stdout when omitted)");

  std::string suite, verify_out;
  mpsim::VerifyOptions vopt;
  std::optional<unsigned> vn, vd;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and exit nonzero on failure");
  verify->add_option("suite", suite, "lemmas, census, varbounds, yaskov or isotropy")
      ->required()
      ->check(CLI::IsMember(mpsim::verify_suites()));
  verify->add_option("--n", vn, "Census ground set size, or block count for yaskov");
  verify->add_option("--d", vd, "Census subset size");
  verify->add_option("--model", vopt.model, "Figure preset for varbounds");
  verify->add_option("--scale", vopt.scale_factor, "Scale factor for varbounds");
  verify->add_option("--samples", vopt.samples, "Monte Carlo samples");
  verify->add_option("--matrices", vopt.matrices, "Test matrices for varbounds")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vopt.seed, "Master seed");
  verify->add_option("--threads", vopt.threads, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_option("-o,--output", verify_out, "JSON report file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) {
      if (sim.config.empty() && sim.preset.empty()) throw mpsim::ConfigError("simulate needs --config or --preset");
      return run_simulate_command(sim);
    }

    if (*figures) {
      fig.preset = figure_id;
      std::vector<std::string> laws = {fig.law};
      if (fig.law == "all") laws = {"rademacher", "uniform", "normal"};
      const bool tensor = figure_id == "2" || figure_id == "3";
      if (!tensor) laws = {""};
      int code = kExitOk;
      const auto base = output_dir(fig.output, "out/figure" + figure_id);
      for (const auto& law : laws) {
        SimulateFlags f = fig;
        f.law = law;
        f.output = (laws.size() > 1 ? base / law : base).string();
        if (const char* env = std::getenv(mpsim::kOutputDirEnv); env && *env && laws.size() > 1)
          f.output = (std::filesystem::path(env) / law).string();
        mpsim::ExperimentConfig config;
        const double scale = f.full ? 1.0 : f.scale.value_or(0.25);
        Json model{{"preset", figure_id}};
        if (!law.empty()) model["law"] = law;
        config.model = mpsim::parse_model(model, scale);
        config.scale_factor = scale;
        config.name = "figure" + figure_id + (law.empty() ? "" : "_" + law);
        if (f.seed) config.seed = *f.seed;
        if (f.bins) config.histogram_bins = *f.bins;
        if (f.threads) config.threads = *f.threads;
        config.output_dir = f.output;
        code = std::max(code, print_simulation(config));
      }
      return code;
    }

    if (*density) {
      mpsim::DensityRequest request{comparison_from_flags(lambda, sigma2, atoms), x_min, x_max, points, eta};
      std::ostringstream out;
      out << "x,value\n";
      if (quantity == "density") {
        for (const auto& [x, f] : mpsim::run_density(request))
          out << mpsim::format_double(x) << ',' << mpsim::format_double(f) << '\n';
      } else {
        if (points < 2 || !(x_max > x_min)) throw mpsim::ConfigError("density: need points >= 2 and x_max > x_min");
        std::optional<mpsim::MpLaw> mp;
        std::optional<mpsim::AnisotropicLaw> aniso;
        if (const auto* c = std::get_if<mpsim::MpComparison>(&request.law)) {
          mp.emplace(c->lambda, c->sigma2);
        } else {
          const auto& a = std::get<mpsim::AnisotropicComparison>(request.law);
          aniso.emplace(a.lambda, mpsim::SpectralMixture(a.atoms));
        }
        for (std::size_t k = 0; k < points; ++k) {
          const double x = x_min + (x_max - x_min) * static_cast<double>(k) / static_cast<double>(points - 1);
          const double v = mp ? mpsim::mp_cdf(x, *mp) : aniso->cdf(x);
          out << mpsim::format_double(x) << ',' << mpsim::format_double(v) << '\n';
        }
      }
      if (density_out.empty()) {
        std::cout << out.str();
      } else {
        write_text(output_dir("", "") / density_out, out.str());
      }
      return kExitOk;
    }

    if (*varcheck) {
      mpsim::MatrixModel model = vc_config.empty() ? mpsim::figure_model(vc_model, vc_scale)
                                                   : mpsim::load_config(vc_config).model;
      const Json report = mpsim::varcheck_report(model, vc_samples, vc_matrices, vc_seed, vc_threads, vc_constants);
      Json echoed = report;
      echoed["seed"] = vc_seed;
      emit_report(echoed, vc_out);
      return report["passed"].get<bool>() ? kExitOk : kExitVerifyFailed;
    }

    if (*census) {
      bool all_match = false;
      const std::string csv = mpsim::census_csv(census_n, census_d, census_threads, &all_match);
      if (census_out.empty()) {
        std::cout << csv;
      } else {
        write_text(output_dir("", "") / census_out, csv);
      }
      return all_match ? kExitOk : kExitVerifyFailed;
    }

    if (*lemmas) {
      const Json report = mpsim::lemmas_report();
      emit_report(report, lemmas_out);
      return report["passed"].get<bool>() ? kExitOk : kExitVerifyFailed;
    }

    if (*verify) {
      vopt.n = vn;
      vopt.d = vd;
      Json report = mpsim::run_verify(suite, vopt);
      report["seed"] = vopt.seed;
      emit_report(report, verify_out);
      return report["passed"].get<bool>() ? kExitOk : kExitVerifyFailed;
    }
  } catch (const mpsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mpsim::CensusBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  return kExitUsage;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mpsim/concentration.hpp"
#include "mpsim/mplaw.hpp"
#include "mpsim/models.hpp"

namespace mpsim {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20220517;
/// Environment variable that overrides the output directory of every subcommand.
inline constexpr const char* kOutputDirEnv = "MPSIM_OUTPUT_DIR";

struct MpComparison {
  double lambda;
  double sigma2;
};
struct AnisotropicComparison {
  double lambda;
  std::vector<SpectralMixture::Atom> atoms;
};
using Comparison = std::variant<MpComparison, AnisotropicComparison>;

struct ExperimentConfig {
  std::string name = "simulate";
  MatrixModel model{IidModel{100, EntryLaw::StdNormal}, 400};
  std::uint64_t seed = kDefaultSeed;
  std::size_t histogram_bins = 100;
  std::filesystem::path output_dir = "out";
  /// Defaults to the law implied by the model: λ = p/m and the entry variances.
  std::optional<Comparison> comparison;
  double scale_factor = 1.0;
  std::uint64_t memory_cap = kDefaultMemoryCap;
  unsigned threads = 1;
};

/// Parses a model object ({"type": "iid"|"block"|"tensor", ...} or {"preset": id}).
MatrixModel parse_model(const Json& j, double scale_factor = 1.0);
Json model_to_json(const MatrixModel& model);

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& config);

Comparison default_comparison(const MatrixModel& model);
Json comparison_to_json(const Comparison& c);

/// Desk-scale geometry for one of the figure experiments ("1a", "1b", "1c",
/// "1d", "2", "3", "4"). Tensor figures take the entry law.
MatrixModel figure_model(const std::string& id, double scale_factor, EntryLaw law = EntryLaw::Rademacher);
std::vector<std::string> figure_ids();

struct Histogram {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> density;
  double integral() const;
};
Histogram make_histogram(std::span<const double> values, std::size_t bins);

struct ExperimentResult {
  std::filesystem::path eigenvalues_csv;
  std::filesystem::path histogram_csv;
  std::filesystem::path theory_csv;
  std::filesystem::path result_json;
  std::vector<double> eigenvalues;
  Histogram histogram;
  double ks_distance = 0.0;
  double wall_seconds = 0.0;
  std::size_t p = 0;
  std::size_t m = 0;
  bool spectrum_residuals_ok = false;
  Json summary;
};

/// Builds X, forms W = XXᵀ/m, computes its spectrum and compares the ESD to
/// the configured law. Single realization. Writes eigenvalues.csv,
/// histogram.csv, theory.csv and result.json into config.output_dir.
ExperimentResult run_simulate(const ExperimentConfig& config);

/// Same pipeline without touching the filesystem.
ExperimentResult simulate_in_memory(const ExperimentConfig& config);

struct DensityRequest {
  Comparison law;
  double x_min = 0.0;
  double x_max = 4.0;
  std::size_t points = 1000;
  double eta = 1e-6;
};
std::vector<std::pair<double, double>> run_density(const DensityRequest& request);

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& columns);
std::string format_double(double v);

struct VerifyOptions {
  std::optional<unsigned> n;
  std::optional<unsigned> d;
  std::string model = "1a";
  double scale_factor = 0.25;
  std::size_t samples = 10000;
  std::size_t matrices = 3;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

/// Suites: lemmas, census, varbounds, yaskov, isotropy. The report carries a
/// top-level "passed" flag.
Json run_verify(const std::string& suite, const VerifyOptions& options);
std::vector<std::string> verify_suites();

Json lemmas_report();
Json census_report(unsigned n, unsigned d, unsigned threads = 1);
std::string census_csv(unsigned n, unsigned d, unsigned threads = 1, bool* all_match = nullptr);
/// Matrix 0 is the identity, the rest are seeded random symmetric matrices with ‖A‖ = 1.
Json varcheck_report(const MatrixModel& model, std::size_t samples, std::size_t matrices, std::uint64_t seed,
                     unsigned threads, const TensorBoundConstants& constants = {});

}  // namespace mpsim

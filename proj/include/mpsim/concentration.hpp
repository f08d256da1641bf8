#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpsim/linalg.hpp"
#include "mpsim/models.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

enum class BoundKind { Block, Tensor, TrivialFourthMoment };
std::string to_string(BoundKind kind);

/// Mean, unbiased variance and the standard error of that variance estimate
/// (fourth-central-moment formula).
struct SampleVariance {
  double mean = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
};
SampleVariance sample_variance(std::span<const double> values);

struct QuadFormReport {
  double mc_variance = 0.0;
  double mc_stderr = 0.0;
  std::size_t samples = 0;
  double theoretical_bound = 0.0;
  BoundKind bound_kind = BoundKind::Block;
  double mean = 0.0;
  double spectral_norm = 0.0;
  double fourth_moment = 0.0;  // K, the largest per-entry fourth moment
  /// E‖x‖⁴·‖A‖² estimated from the same draws.
  double trivial_bound = 0.0;
};

struct TensorBoundConstants {
  double big_c = 1.0;    // multiplicative constant C
  double small_c = 0.5;  // applicability threshold c
};

/// ‖A‖²(K Σ d_k² + 2 Σ d_k).
double bound_block(double spectral_norm_a, double k, std::span<const std::size_t> block_sizes);

/// (K^{1/2} d / n^{1/3})^{3/2}; the dimensionless rate in the tensor bound.
double tensor_bound_rate(double k, std::size_t n, std::size_t d);

/// C ‖A‖² p² (K^{1/2} d / n^{1/3})^{3/2} with p = C(n, d), or nullopt when
/// K^{1/2} d / n^{1/3} ≥ c.
std::optional<double> bound_tensor(double spectral_norm_a, double k, std::size_t n, std::size_t d,
                                   const TensorBoundConstants& constants = {});

double quadratic_form(std::span<const double> x, const DenseMatrix& a);

/// Seeded symmetric Gaussian matrix rescaled to spectral norm 1.
DenseMatrix random_symmetric_unit_norm(std::size_t p, Stream& stream);

/// Copy of A keeping only the diagonal blocks of the given partition.
DenseMatrix block_diagonal_part(const DenseMatrix& a, std::span<const std::size_t> block_sizes);

struct ConcentrationOptions {
  TensorBoundConstants tensor_constants{};
  unsigned threads = 1;
};

/// Monte-Carlo Var(xᵀAx) over independent column draws, with the applicable bound.
QuadFormReport var_quadform_mc(const ColumnLaw& law, const DenseMatrix& a, std::size_t samples,
                               const SeedSpec& seeds, const ConcentrationOptions& options = {});

struct DecompositionReport {
  double var_diag = 0.0;
  double var_off = 0.0;
  double var_total = 0.0;
  double stderr_diag = 0.0;
  double stderr_off = 0.0;
  double stderr_total = 0.0;
  double combined_stderr = 0.0;  // sqrt of the summed squared stderrs
  double discrepancy = 0.0;      // var_total − var_diag − var_off
  bool additive = false;         // |discrepancy| ≤ 5·combined_stderr
};

/// Splits A = D + (A − D) along the model's blocks and compares the variances.
DecompositionReport decomposition_check(const BlockModel& model, const DenseMatrix& a, std::size_t samples,
                                        const SeedSpec& seeds, unsigned threads = 1);

struct NormStatistic {
  std::vector<double> values;  // U_p = ‖x‖²/p per draw
  double mean = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
};

NormStatistic norm_statistic(const ColumnLaw& law, std::size_t samples, const SeedSpec& seeds);

/// Lower bound (d²/n) Var(x₁²) = (d²/n)(K − 1) on Var(U_p) for the tensor model.
double hoeffding_lower_bound(std::size_t n, std::size_t d, EntryLaw law);

struct YaskovReport {
  NormStatistic norm;
  double zero_fraction = 0.0;
  double expected_zero_fraction = 0.0;  // 2^{-blocks}
  double binomial_stderr = 0.0;         // sqrt(q(1−q)/N) at the expected q
};

/// Each block of a base draw is zeroed independently with probability ½ and the
/// result is scaled by √2.
YaskovReport yaskov_counterexample(const BlockModel& base, std::size_t samples, const SeedSpec& seeds);

}  // namespace mpsim

#include "mpsim/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mpsim {

namespace {

void require_samples(std::size_t samples, const char* where) {
  if (samples < 100) throw std::invalid_argument(std::string(where) + ": at least 100 samples required");
}

void require_square(const DenseMatrix& a, std::size_t p, const char* where) {
  if (a.rows() != p || a.cols() != p) {
    throw std::invalid_argument(std::string(where) + ": matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", model dimension is " + std::to_string(p));
  }
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Block: return "block";
    case BoundKind::Tensor: return "tensor";
    case BoundKind::TrivialFourthMoment: return "trivial_fourth_moment";
  }
  return "?";
}

SampleVariance sample_variance(std::span<const double> values) {
  SampleVariance out;
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("sample_variance: need at least two values");
  const double nd = static_cast<double>(n);
  out.mean = pairwise_sum(values) / nd;
  std::vector<double> squares(n), fourths(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = values[i] - out.mean;
    squares[i] = c * c;
    fourths[i] = squares[i] * squares[i];
  }
  const double m2 = pairwise_sum(squares) / nd;
  const double m4 = pairwise_sum(fourths) / nd;
  out.variance = m2 * nd / (nd - 1.0);
  const double var_of_estimate = (m4 - m2 * m2 * (nd - 3.0) / (nd - 1.0)) / nd;
  out.variance_stderr = std::sqrt(std::max(0.0, var_of_estimate));
  return out;
}

double bound_block(double spectral_norm_a, double k, std::span<const std::size_t> block_sizes) {
  double squares = 0.0;
  double total = 0.0;
  for (std::size_t d : block_sizes) {
    squares += static_cast<double>(d) * static_cast<double>(d);
    total += static_cast<double>(d);
  }
  return spectral_norm_a * spectral_norm_a * (k * squares + 2.0 * total);
}

double tensor_bound_rate(double k, std::size_t n, std::size_t d) {
  const double ratio = std::sqrt(k) * static_cast<double>(d) / std::cbrt(static_cast<double>(n));
  return std::pow(ratio, 1.5);
}

std::optional<double> bound_tensor(double spectral_norm_a, double k, std::size_t n, std::size_t d,
                                   const TensorBoundConstants& constants) {
  const double ratio = std::sqrt(k) * static_cast<double>(d) / std::cbrt(static_cast<double>(n));
  if (ratio >= constants.small_c) return std::nullopt;
  const double p = static_cast<double>(binomial_u64(n, d));
  return constants.big_c * spectral_norm_a * spectral_norm_a * p * p * std::pow(ratio, 1.5);
}

double quadratic_form(std::span<const double> x, const DenseMatrix& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const auto row = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += row[j] * x[j];
    total += x[i] * s;
  }
  return total;
}

DenseMatrix random_symmetric_unit_norm(std::size_t p, Stream& stream) {
  DenseMatrix a(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = stream.normal();
  const double norm = spectral_norm(a);
  for (double& v : a.entries()) v /= norm;
  return a;
}

DenseMatrix block_diagonal_part(const DenseMatrix& a, std::span<const std::size_t> block_sizes) {
  std::size_t total = 0;
  for (std::size_t d : block_sizes) total += d;
  require_square(a, total, "block_diagonal_part");
  DenseMatrix d(a.rows(), a.cols());
  std::size_t offset = 0;
  for (std::size_t size : block_sizes) {
    for (std::size_t i = offset; i < offset + size; ++i)
      for (std::size_t j = offset; j < offset + size; ++j) d(i, j) = a(i, j);
    offset += size;
  }
  return d;
}

QuadFormReport var_quadform_mc(const ColumnLaw& law, const DenseMatrix& a, std::size_t samples,
                               const SeedSpec& seeds, const ConcentrationOptions& options) {
  validate(law);
  require_samples(samples, "var_quadform_mc");
  const std::size_t p = dimension(law);
  require_square(a, p, "var_quadform_mc");

  std::vector<double> forms(samples), norms4(samples);
  parallel_for(samples, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(p);
    for (std::size_t t = begin; t < end; ++t) {
      Stream stream = seeds.stream(t);
      sample_column(law, stream, x);
      forms[t] = quadratic_form(x, a);
      double n2 = 0.0;
      for (double v : x) n2 += v * v;
      norms4[t] = n2 * n2;
    }
  });

  QuadFormReport report;
  const SampleVariance stats = sample_variance(forms);
  report.samples = samples;
  report.mean = stats.mean;
  report.mc_variance = stats.variance;
  report.mc_stderr = stats.variance_stderr;
  report.spectral_norm = spectral_norm(a);
  report.fourth_moment = max_fourth_moment(law);
  report.trivial_bound =
      pairwise_sum(norms4) / static_cast<double>(samples) * report.spectral_norm * report.spectral_norm;

  if (const auto* tensor = std::get_if<TensorModel>(&law)) {
    const auto bound = bound_tensor(report.spectral_norm, report.fourth_moment, tensor->n, tensor->d,
                                    options.tensor_constants);
    if (bound) {
      report.bound_kind = BoundKind::Tensor;
      report.theoretical_bound = *bound;
    } else {
      report.bound_kind = BoundKind::TrivialFourthMoment;
      report.theoretical_bound = report.trivial_bound;
    }
  } else {
    const auto sizes = block_sizes(law);
    report.bound_kind = BoundKind::Block;
    report.theoretical_bound = bound_block(report.spectral_norm, report.fourth_moment, sizes);
  }
  return report;
}

DecompositionReport decomposition_check(const BlockModel& model, const DenseMatrix& a, std::size_t samples,
                                        const SeedSpec& seeds, unsigned threads) {
  const ColumnLaw law = model;
  validate(law);
  require_samples(samples, "decomposition_check");
  const std::size_t p = dimension(law);
  require_square(a, p, "decomposition_check");
  const double tol = 1e-12 * std::max(1.0, a.max_abs());
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) throw std::invalid_argument("decomposition_check: A is not symmetric");

  const auto sizes = block_sizes(law);
  const DenseMatrix diag = block_diagonal_part(a, sizes);
  DenseMatrix off = a;
  for (std::size_t k = 0; k < off.entries().size(); ++k) off.entries()[k] -= diag.entries()[k];

  std::vector<double> q_diag(samples), q_off(samples), q_total(samples);
  parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(p);
    for (std::size_t t = begin; t < end; ++t) {
      Stream stream = seeds.stream(t);
      sample_column(law, stream, x);
      q_diag[t] = quadratic_form(x, diag);
      q_off[t] = quadratic_form(x, off);
      q_total[t] = quadratic_form(x, a);
    }
  });

  const auto sd = sample_variance(q_diag);
  const auto so = sample_variance(q_off);
  const auto st = sample_variance(q_total);
  DecompositionReport r;
  r.var_diag = sd.variance;
  r.var_off = so.variance;
  r.var_total = st.variance;
  r.stderr_diag = sd.variance_stderr;
  r.stderr_off = so.variance_stderr;
  r.stderr_total = st.variance_stderr;
  r.combined_stderr = std::sqrt(r.stderr_diag * r.stderr_diag + r.stderr_off * r.stderr_off +
                                r.stderr_total * r.stderr_total);
  r.discrepancy = r.var_total - r.var_diag - r.var_off;
  r.additive = std::abs(r.discrepancy) <= 5.0 * r.combined_stderr + 1e-12 * std::max(1.0, r.var_total);
  return r;
}

namespace {

NormStatistic summarize(std::vector<double> values) {
  NormStatistic out;
  const auto stats = sample_variance(values);
  out.values = std::move(values);
  out.mean = stats.mean;
  out.variance = stats.variance;
  out.variance_stderr = stats.variance_stderr;
  return out;
}

}  // namespace

NormStatistic norm_statistic(const ColumnLaw& law, std::size_t samples, const SeedSpec& seeds) {
  validate(law);
  require_samples(samples, "norm_statistic");
  const std::size_t p = dimension(law);
  std::vector<double> values(samples);
  std::vector<double> x(p);
  for (std::size_t t = 0; t < samples; ++t) {
    Stream stream = seeds.stream(t);
    sample_column(law, stream, x);
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    values[t] = n2 / static_cast<double>(p);
  }
  return summarize(std::move(values));
}

double hoeffding_lower_bound(std::size_t n, std::size_t d, EntryLaw law) {
  const double dd = static_cast<double>(d);
  return dd * dd / static_cast<double>(n) * (fourth_moment(law) - 1.0);
}

YaskovReport yaskov_counterexample(const BlockModel& base, std::size_t samples, const SeedSpec& seeds) {
  const ColumnLaw law = base;
  validate(law);
  require_samples(samples, "yaskov_counterexample");
  const std::size_t p = dimension(law);
  std::vector<double> values(samples);
  std::vector<double> x(p);
  std::size_t zeros = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    Stream stream = seeds.stream(t);
    std::size_t offset = 0;
    for (const auto& block : base.blocks) {
      const std::size_t size = block_size(block);
      auto out = std::span<double>(x).subspan(offset, size);
      sample_block(block, stream, out);
      if (stream.coin()) {
        std::fill(out.begin(), out.end(), 0.0);
      } else {
        for (double& v : out) v *= std::numbers::sqrt2;
      }
      offset += size;
    }
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) ++zeros;
    values[t] = n2 / static_cast<double>(p);
  }
  YaskovReport r;
  r.norm = summarize(std::move(values));
  r.zero_fraction = static_cast<double>(zeros) / static_cast<double>(samples);
  r.expected_zero_fraction = std::ldexp(1.0, -static_cast<int>(base.blocks.size()));
  const double q = r.expected_zero_fraction;
  r.binomial_stderr = std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
  return r;
}

}  // namespace mpsim

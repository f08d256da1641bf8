#include "mpsim/models.hpp"

#include <cmath>
#include <numbers>

namespace mpsim {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const double kSqrt3 = std::sqrt(3.0);
}  // namespace

double fourth_moment(EntryLaw law) {
  switch (law) {
    case EntryLaw::Rademacher: return 1.0;
    case EntryLaw::UniformSqrt3: return 9.0 / 5.0;
    case EntryLaw::StdNormal: return 3.0;
  }
  return 0.0;
}

double draw(EntryLaw law, Stream& stream) {
  switch (law) {
    case EntryLaw::Rademacher: return stream.coin() ? 1.0 : -1.0;
    case EntryLaw::UniformSqrt3: return kSqrt3 * (2.0 * stream.uniform() - 1.0);
    case EntryLaw::StdNormal: return stream.normal();
  }
  return 0.0;
}

std::string to_string(EntryLaw law) {
  switch (law) {
    case EntryLaw::Rademacher: return "rademacher";
    case EntryLaw::UniformSqrt3: return "uniform";
    case EntryLaw::StdNormal: return "normal";
  }
  return "?";
}

EntryLaw entry_law_from_string(const std::string& name) {
  if (name == "rademacher" || name == "bernoulli") return EntryLaw::Rademacher;
  if (name == "uniform" || name == "uniform_sqrt3") return EntryLaw::UniformSqrt3;
  if (name == "normal" || name == "std_normal" || name == "gaussian") return EntryLaw::StdNormal;
  throw ModelError("unknown entry law '" + name + "'");
}

std::size_t block_size(const BlockKind& kind) {
  return std::visit(overloaded{[](const GaussianHermite&) -> std::size_t { return 2; },
                               [](const XorTriple&) -> std::size_t { return 3; },
                               [](const BasisVector& b) { return b.dim; },
                               [](const IidBlock& b) { return b.dim; }},
                    kind);
}

double block_fourth_moment(const BlockKind& kind) {
  // GaussianHermite: E z⁴ = 3 and E((z²−1)/√2)⁴ = (105 − 60 + 18 − 4 + 1)/4 = 15.
  return std::visit(overloaded{[](const GaussianHermite&) { return 15.0; },
                               [](const XorTriple&) { return 1.0 / 16.0; },
                               [](const BasisVector& b) { return static_cast<double>(b.dim); },
                               [](const IidBlock& b) { return fourth_moment(b.law); }},
                    kind);
}

double block_entry_variance(const BlockKind& kind) {
  return std::holds_alternative<XorTriple>(kind) ? 0.25 : 1.0;
}

std::array<double, 2> gaussian_hermite_from(double z) { return {z, (z * z - 1.0) / std::numbers::sqrt2}; }

std::array<double, 3> xor_triple_from(double b1, double b2) {
  const bool differ = (b1 > 0.0) != (b2 > 0.0);
  return {b1, b2, differ ? 0.5 : -0.5};
}

void sample_block(const BlockKind& kind, Stream& stream, std::span<double> out) {
  std::visit(overloaded{[&](const GaussianHermite&) {
                          const auto v = gaussian_hermite_from(stream.normal());
                          out[0] = v[0];
                          out[1] = v[1];
                        },
                        [&](const XorTriple&) {
                          const double b1 = stream.coin() ? 0.5 : -0.5;
                          const double b2 = stream.coin() ? 0.5 : -0.5;
                          const auto v = xor_triple_from(b1, b2);
                          std::copy(v.begin(), v.end(), out.begin());
                        },
                        [&](const BasisVector& b) {
                          std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(b.dim), 0.0);
                          const auto i = stream.below(b.dim);
                          const double magnitude = std::sqrt(static_cast<double>(b.dim));
                          out[i] = stream.coin() ? magnitude : -magnitude;
                        },
                        [&](const IidBlock& b) {
                          for (std::size_t i = 0; i < b.dim; ++i) out[i] = draw(b.law, stream);
                        }},
             kind);
}

BlockModel repeat_block(const BlockKind& kind, std::size_t count) {
  return BlockModel{std::vector<BlockKind>(count, kind)};
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __uint128_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(result);
}

std::size_t dimension(const ColumnLaw& law) {
  return std::visit(overloaded{[](const IidModel& m) { return m.p; },
                               [](const BlockModel& m) {
                                 std::size_t p = 0;
                                 for (const auto& b : m.blocks) p += block_size(b);
                                 return p;
                               },
                               [](const TensorModel& m) {
                                 return static_cast<std::size_t>(binomial_u64(m.n, m.d));
                               }},
                    law);
}

double max_fourth_moment(const ColumnLaw& law) {
  return std::visit(overloaded{[](const IidModel& m) { return fourth_moment(m.law); },
                               [](const BlockModel& m) {
                                 double k = 0.0;
                                 for (const auto& b : m.blocks) k = std::max(k, block_fourth_moment(b));
                                 return k;
                               },
                               [](const TensorModel& m) { return fourth_moment(m.law); }},
                    law);
}

std::vector<double> entry_variances(const ColumnLaw& law) {
  if (const auto* blocks = std::get_if<BlockModel>(&law)) {
    std::vector<double> out;
    for (const auto& b : blocks->blocks) out.insert(out.end(), block_size(b), block_entry_variance(b));
    return out;
  }
  return std::vector<double>(dimension(law), 1.0);
}

std::vector<std::size_t> block_sizes(const ColumnLaw& law) {
  if (const auto* blocks = std::get_if<BlockModel>(&law)) {
    std::vector<std::size_t> out;
    for (const auto& b : blocks->blocks) out.push_back(block_size(b));
    return out;
  }
  return std::vector<std::size_t>(dimension(law), 1);
}

void validate(const ColumnLaw& law) {
  std::visit(overloaded{[](const IidModel& m) {
                          if (m.p == 0) throw ModelError("iid model: p must be at least 1");
                        },
                        [](const BlockModel& m) {
                          if (m.blocks.empty()) throw ModelError("block model: no blocks");
                          for (const auto& b : m.blocks)
                            if (block_size(b) == 0) throw ModelError("block model: empty block");
                        },
                        [](const TensorModel& m) {
                          if (m.d < 1 || m.d > m.n) throw ModelError("tensor model: need 1 <= d <= n");
                        }},
             law);
}

namespace {

void colex_products(std::span<const double> x, std::size_t d, std::size_t limit, double prefix,
                    std::vector<double>& out) {
  if (d == 0) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t top = d - 1; top < limit; ++top) colex_products(x, d - 1, top, prefix * x[top], out);
}

}  // namespace

std::vector<double> tensor_products(std::span<const double> x, std::size_t d) {
  if (d < 1 || d > x.size()) throw ModelError("tensor_products: need 1 <= d <= n");
  std::vector<double> out;
  out.reserve(binomial_u64(x.size(), d));
  colex_products(x, d, x.size(), 1.0, out);
  return out;
}

std::vector<double> tensor_column(std::size_t n, std::size_t d, EntryLaw law, Stream& stream,
                                  std::uint64_t cap) {
  if (d < 1 || d > n) throw ModelError("tensor_column: need 1 <= d <= n");
  const auto p = binomial_u64(n, d);
  if (p > cap) {
    throw ModelError("tensor_column: C(" + std::to_string(n) + ", " + std::to_string(d) +
                     ") exceeds cap " + std::to_string(cap));
  }
  std::vector<double> x(n);
  for (auto& v : x) v = draw(law, stream);
  return tensor_products(x, d);
}

void sample_column(const ColumnLaw& law, Stream& stream, std::span<double> out) {
  std::visit(overloaded{[&](const IidModel& m) {
                          for (std::size_t i = 0; i < m.p; ++i) out[i] = draw(m.law, stream);
                        },
                        [&](const BlockModel& m) {
                          std::size_t offset = 0;
                          for (const auto& b : m.blocks) {
                            const std::size_t size = block_size(b);
                            sample_block(b, stream, out.subspan(offset, size));
                            offset += size;
                          }
                        },
                        [&](const TensorModel& m) {
                          const auto column = tensor_column(m.n, m.d, m.law, stream);
                          std::copy(column.begin(), column.end(), out.begin());
                        }},
             law);
}

DenseMatrix build_matrix(const MatrixModel& model, const SeedSpec& seeds, const BuildOptions& options) {
  validate(model.column);
  if (model.m == 0) throw ModelError("build_matrix: m must be at least 1");
  if (const auto* t = std::get_if<TensorModel>(&model.column); t && binomial_u64(t->n, t->d) > options.memory_cap)
    throw ModelError("build_matrix: tensor dimension exceeds memory cap");
  const std::size_t p = dimension(model.column);
  const std::size_t m = model.m;
  const __uint128_t entries = static_cast<__uint128_t>(p) * m;
  if (entries > options.memory_cap) {
    throw ModelError("build_matrix: p*m = " + std::to_string(static_cast<std::uint64_t>(entries)) +
                     " exceeds memory cap " + std::to_string(options.memory_cap));
  }
  DenseMatrix x(p, m);
  parallel_for(m, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> column(p);
    for (std::size_t k = begin; k < end; ++k) {
      Stream stream = seeds.stream(k);
      sample_column(model.column, stream, column);
      for (std::size_t i = 0; i < p; ++i) x(i, k) = column[i];
    }
  });
  return x;
}

DenseMatrix empirical_covariance_of_column(const ColumnLaw& law, std::size_t trials, const SeedSpec& seeds) {
  validate(law);
  if (trials == 0) throw ModelError("empirical_covariance_of_column: trials must be at least 1");
  const std::size_t p = dimension(law);
  DenseMatrix cov(p, p);
  std::vector<double> x(p);
  for (std::size_t t = 0; t < trials; ++t) {
    Stream stream = seeds.stream(t);
    sample_column(law, stream, x);
    for (std::size_t i = 0; i < p; ++i) {
      if (x[i] == 0.0) continue;
      auto row = cov.row(i);
      for (std::size_t j = 0; j <= i; ++j) row[j] += x[i] * x[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(trials);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      cov(i, j) *= inv;
      cov(j, i) = cov(i, j);
    }
  return cov;
}

}  // namespace mpsim

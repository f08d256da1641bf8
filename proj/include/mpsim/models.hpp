#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mpsim/linalg.hpp"
#include "mpsim/parallel.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mean zero, unit variance entry distributions.
enum class EntryLaw { Rademacher, UniformSqrt3, StdNormal };

/// E x⁴: 1, 9/5 and 3 respectively.
double fourth_moment(EntryLaw law);
double draw(EntryLaw law, Stream& stream);
std::string to_string(EntryLaw law);
EntryLaw entry_law_from_string(const std::string& name);

// Block kinds. Each block is mean zero and independent of every other block.
struct GaussianHermite {};  // (z, (z²−1)/√2), z ~ N(0,1)
struct XorTriple {};        // (b₁, b₂, b₃), bᵢ = ±½, b₃ = ½ iff signs of b₁, b₂ differ
struct BasisVector {        // ±√d eᵢ with i uniform in [d]
  std::size_t dim;
};
struct IidBlock {
  std::size_t dim;
  EntryLaw law;
};
using BlockKind = std::variant<GaussianHermite, XorTriple, BasisVector, IidBlock>;

std::size_t block_size(const BlockKind& kind);
/// Largest per-entry fourth moment within the block.
double block_fourth_moment(const BlockKind& kind);
/// Per-entry variance (1 for all kinds except XorTriple, which has ¼).
double block_entry_variance(const BlockKind& kind);

std::array<double, 2> gaussian_hermite_from(double z);
std::array<double, 3> xor_triple_from(double b1, double b2);

/// Writes one block into out (size block_size(kind)).
void sample_block(const BlockKind& kind, Stream& stream, std::span<double> out);

// Column laws.
struct IidModel {
  std::size_t p;
  EntryLaw law;
};
struct BlockModel {
  std::vector<BlockKind> blocks;
};
struct TensorModel {
  std::size_t n;
  std::size_t d;
  EntryLaw law;
};
using ColumnLaw = std::variant<IidModel, BlockModel, TensorModel>;

BlockModel repeat_block(const BlockKind& kind, std::size_t count);

std::size_t dimension(const ColumnLaw& law);
double max_fourth_moment(const ColumnLaw& law);
/// Per-entry variances (the diagonal of E xxᵀ); all models are uncorrelated.
std::vector<double> entry_variances(const ColumnLaw& law);
/// Block sizes of the independence partition (all ones for IidModel).
std::vector<std::size_t> block_sizes(const ColumnLaw& law);
void validate(const ColumnLaw& law);

/// Default cap on C(n, d) for a single tensor column.
inline constexpr std::uint64_t kDefaultTensorCap = 20'000'000;
/// Default cap on p·m entries of a data matrix.
inline constexpr std::uint64_t kDefaultMemoryCap = 200'000'000;

/// C(n, k) as a saturating 64-bit count.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

/// x ∈ ℝⁿ ↦ (∏_{i∈S} xᵢ) over all d-subsets S in colexicographic order.
std::vector<double> tensor_products(std::span<const double> x, std::size_t d);

std::vector<double> tensor_column(std::size_t n, std::size_t d, EntryLaw law, Stream& stream,
                                  std::uint64_t cap = kDefaultTensorCap);

/// One draw of the column law into out (size dimension(law)).
void sample_column(const ColumnLaw& law, Stream& stream, std::span<double> out);

struct MatrixModel {
  ColumnLaw column;
  std::size_t m;
};

struct BuildOptions {
  std::uint64_t memory_cap = kDefaultMemoryCap;
  unsigned threads = 1;
};

/// p×m matrix whose column k is drawn from seeds.stream(k). Bit-identical for
/// any thread count.
DenseMatrix build_matrix(const MatrixModel& model, const SeedSpec& seeds, const BuildOptions& options = {});

/// (1/trials) Σ x xᵀ over independent draws.
DenseMatrix empirical_covariance_of_column(const ColumnLaw& law, std::size_t trials, const SeedSpec& seeds);

}  // namespace mpsim

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mpsim/models.hpp"
#include "mpsim/rng.hpp"

using namespace mpsim;

namespace {

// Colex order compares the largest differing element; for bitmasks that is plain integer order.
std::vector<std::uint64_t> colex_masks(unsigned n, unsigned d) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
    if (static_cast<unsigned>(std::popcount(m)) == d) out.push_back(m);
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("rng streams") {
  Stream a(1), b(1), c(2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  const SeedSpec seeds(42);
  CHECK(seeds.stream(0).next_u64() != seeds.stream(1).next_u64());
  CHECK(seeds.stream(3).next_u64() == SeedSpec(42).stream(3).next_u64());
  CHECK(seeds.child(1).stream(0).next_u64() != seeds.stream(0).next_u64());
}

TEST_CASE("rng marginals") {
  Stream s(99);
  const int n = 200000;
  std::vector<int> counts(7, 0);
  double sum = 0, sum2 = 0, sum4 = 0, umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    ++counts[s.below(7)];
    const double u = s.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  CHECK(umin >= 0.0);
  CHECK(umax < 1.0);
  double chi2 = 0;
  for (int c : counts) chi2 += std::pow(c - n / 7.0, 2) / (n / 7.0);
  CHECK(chi2 < 30.0);  // 6 dof, far tail
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sum4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("entry laws") {
  CHECK(fourth_moment(EntryLaw::Rademacher) == 1.0);
  CHECK(fourth_moment(EntryLaw::UniformSqrt3) == doctest::Approx(1.8));
  CHECK(fourth_moment(EntryLaw::StdNormal) == 3.0);
  for (auto law : {EntryLaw::Rademacher, EntryLaw::UniformSqrt3, EntryLaw::StdNormal}) {
    CHECK(entry_law_from_string(to_string(law)) == law);
    Stream s(5);
    const int n = 400000;
    double m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = draw(law, s);
      m2 += x * x;
      m4 += x * x * x * x;
      if (law == EntryLaw::Rademacher) REQUIRE(std::abs(x) == 1.0);
      if (law == EntryLaw::UniformSqrt3) REQUIRE(std::abs(x) <= std::sqrt(3.0));
    }
    CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m4 / n == doctest::Approx(fourth_moment(law)).epsilon(0.03));
  }
  CHECK_THROWS_AS(entry_law_from_string("cauchy"), ModelError);
}

TEST_CASE("block constructions") {
  CHECK(xor_triple_from(0.5, -0.5) == std::array<double, 3>{0.5, -0.5, 0.5});
  CHECK(xor_triple_from(0.5, 0.5) == std::array<double, 3>{0.5, 0.5, -0.5});
  CHECK(xor_triple_from(-0.5, -0.5) == std::array<double, 3>{-0.5, -0.5, -0.5});
  CHECK(gaussian_hermite_from(1.0) == std::array<double, 2>{1.0, 0.0});
  Stream s(8);
  std::vector<double> out(4);
  for (int t = 0; t < 100; ++t) {
    sample_block(BasisVector{4}, s, out);
    CHECK(std::count_if(out.begin(), out.end(), [](double v) { return v != 0.0; }) == 1);
    CHECK(std::abs(*std::max_element(out.begin(), out.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
          })) == 2.0);
  }
}

TEST_CASE("block fourth moments") {
  CHECK(block_fourth_moment(GaussianHermite{}) == 15.0);
  CHECK(block_fourth_moment(XorTriple{}) == doctest::Approx(1.0 / 16.0));
  CHECK(block_fourth_moment(BasisVector{7}) == 7.0);
  CHECK(block_entry_variance(XorTriple{}) == doctest::Approx(0.25));
  // E[((z²−1)/√2)⁴] from the normal moments 1, 3, 15, 105.
  CHECK((105.0 - 4 * 15.0 + 6 * 3.0 - 4 * 1.0 + 1.0) / 4.0 == 15.0);
}

TEST_CASE("tensor products in colex order") {
  CHECK(tensor_products(std::vector<double>{1, 2, 3}, 2) == std::vector<double>{2, 3, 6});
  CHECK(tensor_products(std::vector<double>{4, -1, 2, 7}, 1) == std::vector<double>{4, -1, 2, 7});
  CHECK(tensor_products(std::vector<double>{2, 3, 5, 7}, 4) == std::vector<double>{210});
  const std::vector<double> x = {2, 3, 5, 7, 11, 13, 17};
  for (unsigned d = 1; d <= 7; ++d) {
    const auto got = tensor_products(x, d);
    const auto masks = colex_masks(7, d);
    REQUIRE(got.size() == masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k) {
      double prod = 1;
      for (unsigned i = 0; i < 7; ++i)
        if (masks[k] >> i & 1) prod *= x[i];
      CHECK(got[k] == prod);
    }
  }
  CHECK_THROWS_AS(tensor_products(x, 0), ModelError);
  CHECK_THROWS_AS(tensor_products(x, 8), ModelError);
}

TEST_CASE("model geometry") {
  CHECK(dimension(repeat_block(GaussianHermite{}, 2000)) == 4000);
  CHECK(dimension(TensorModel{45, 3, EntryLaw::Rademacher}) == 14190);
  CHECK(dimension(repeat_block(XorTriple{}, 600)) == 1800);
  CHECK(binomial_u64(145, 2) == 10440);
  CHECK_THROWS_AS(validate(BlockModel{}), ModelError);
  CHECK_THROWS_AS(validate(TensorModel{3, 4, EntryLaw::Rademacher}), ModelError);
  CHECK_THROWS_AS(validate(IidModel{0, EntryLaw::Rademacher}), ModelError);
}

TEST_CASE("build matrix") {
  const DenseMatrix x = build_matrix({IidModel{2, EntryLaw::Rademacher}, 3}, SeedSpec(1));
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 3);
  for (double v : x.entries()) CHECK(std::abs(v) == 1.0);
  CHECK_THROWS_AS(build_matrix({IidModel{1000, EntryLaw::StdNormal}, 1000}, SeedSpec(1), {100000, 1}), ModelError);
  CHECK_THROWS_AS(build_matrix({TensorModel{45, 3, EntryLaw::Rademacher}, 28380}, SeedSpec(1)), ModelError);
}

TEST_CASE("build matrix is deterministic across thread counts") {
  const std::vector<MatrixModel> models = {
      {repeat_block(GaussianHermite{}, 30), 77},
      {repeat_block(XorTriple{}, 10), 50},
      {TensorModel{8, 3, EntryLaw::UniformSqrt3}, 40},
      {IidModel{13, EntryLaw::StdNormal}, 64},
  };
  for (const auto& model : models) {
    const DenseMatrix one = build_matrix(model, SeedSpec(11), {kDefaultMemoryCap, 1});
    CHECK(one == build_matrix(model, SeedSpec(11), {kDefaultMemoryCap, 1}));
    CHECK(one == build_matrix(model, SeedSpec(11), {kDefaultMemoryCap, 3}));
    CHECK(one == build_matrix(model, SeedSpec(11), {kDefaultMemoryCap, 8}));
    CHECK(!(one == build_matrix(model, SeedSpec(12), {kDefaultMemoryCap, 1})));
  }
}

TEST_CASE("gaussian hermite covariance is the identity") {
  const DenseMatrix cov = empirical_covariance_of_column(repeat_block(GaussianHermite{}, 1), 1'000'000, SeedSpec(4));
  CHECK(std::abs(cov(0, 0) - 1.0) < 0.01);
  CHECK(std::abs(cov(1, 1) - 1.0) < 0.01);
  CHECK(std::abs(cov(0, 1)) < 0.01);
}

TEST_CASE("isotropy within 4 sqrt(K / trials)") {
  const std::size_t trials = 100000;
  struct Case {
    ColumnLaw law;
    double variance;
    double k;
  };
  const std::vector<Case> cases = {
      {repeat_block(XorTriple{}, 3), 0.25, 1.0 / 16.0},
      {repeat_block(BasisVector{5}, 2), 1.0, 5.0},
      {TensorModel{5, 2, EntryLaw::Rademacher}, 1.0, 1.0},
      {repeat_block(IidBlock{3, EntryLaw::UniformSqrt3}, 2), 1.0, 1.8},
  };
  for (const auto& c : cases) {
    const DenseMatrix cov = empirical_covariance_of_column(c.law, trials, SeedSpec(17));
    const double tol = 4.0 * std::sqrt(c.k / trials);
    for (std::size_t i = 0; i < cov.rows(); ++i)
      for (std::size_t j = 0; j < cov.cols(); ++j)
        CHECK(std::abs(cov(i, j) - (i == j ? c.variance : 0.0)) <= tol);
  }
}

TEST_CASE("mean zero and block independence") {
  const std::size_t samples = 100000;
  const std::vector<ColumnLaw> laws = {
      repeat_block(GaussianHermite{}, 2),
      repeat_block(XorTriple{}, 2),
      repeat_block(BasisVector{3}, 2),
      TensorModel{6, 2, EntryLaw::StdNormal},
  };
  const SeedSpec seeds(23);
  for (const auto& law : laws) {
    const std::size_t p = dimension(law);
    std::vector<std::vector<double>> draws(p, std::vector<double>(samples));
    std::vector<double> x(p);
    for (std::size_t t = 0; t < samples; ++t) {
      Stream s = seeds.stream(t);
      sample_column(law, s, x);
      for (std::size_t i = 0; i < p; ++i) draws[i][t] = x[i];
    }
    const auto sizes = block_sizes(law);
    for (std::size_t i = 0; i < p; ++i) {
      double var = 0;
      for (double v : draws[i]) var += v * v;
      var /= samples;
      CHECK(std::abs(mean(draws[i])) <= 4.0 * std::sqrt(var / samples));
    }
    if (std::holds_alternative<BlockModel>(law)) {
      // Squares of entries from different blocks are uncorrelated only if the blocks are independent.
      const std::size_t i = 0, j = sizes[0];
      std::vector<double> a(samples), b(samples), ab(samples);
      for (std::size_t t = 0; t < samples; ++t) {
        a[t] = draws[i][t] * draws[i][t];
        b[t] = draws[j][t] * draws[j][t];
        ab[t] = a[t] * b[t];
      }
      const double ma = mean(a), mb = mean(b);
      const double cov = mean(ab) - ma * mb;
      double va = 0, vb = 0;
      for (std::size_t t = 0; t < samples; ++t) {
        va += (a[t] - ma) * (a[t] - ma);
        vb += (b[t] - mb) * (b[t] - mb);
      }
      const double sd = std::sqrt(va / samples) * std::sqrt(vb / samples) / std::sqrt(static_cast<double>(samples));
      CHECK(std::abs(cov) <= 5.0 * sd);
    }
  }
}

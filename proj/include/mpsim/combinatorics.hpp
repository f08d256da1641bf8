#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace mpsim {

using BigCount = boost::multiprecision::cpp_int;

/// Exact C(n, k); zero when k < 0, k > n or n < 0.
BigCount binom(const BigCount& n, const BigCount& k);
BigCount binom(long long n, long long k);

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct CheckResult {
  Verdict verdict = Verdict::Pass;
  std::string witness;  // violated inequality with exact values, empty on pass
  bool passed() const { return verdict == Verdict::Pass; }
};

/// (n/d)^d ≤ C(n,d) ≤ Σ_{k≤d} C(n,k) ≤ (e n/d)^d, with e replaced by the
/// rational upper bound 27182818285/10^10 in the last inequality.
CheckResult check_lemma_bounds(long long n, long long d);
/// C(a, b−c)·C(a, b+c) ≤ C(a, b)².
CheckResult check_log_concavity(long long a, long long b, long long c);
/// C(m, t−s) ≤ (t/(m−t+1))^s · C(m, t), for 1 ≤ s ≤ t ≤ m.
CheckResult check_decay(long long m, long long t, long long s);
/// C(m+p, t) ≤ (1+δ) C(m, t), δ = 2tp/(m+1−t); NotApplicable when δ > ½.
CheckResult check_stability(long long m, long long p, long long t);
/// The diagonal tensor-sum chain: C(d,v)K^v ≤ C(Kd,v); Vandermonde
/// Σ C(Kd,v)C(n−d,d−v) = C(n−d+Kd,d); and
/// Σ_{v≥1} C(d,v)C(n−d,d−v)K^v ≤ C(n−d+Kd,d) − C(n−d,d). Requires 4d ≤ n.
CheckResult check_diag_sum(long long n, long long d, long long k);

struct GridReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t not_applicable = 0;
  std::vector<std::string> failures;  // first few witnesses
  bool ok() const { return failed == 0; }
};

GridReport lemma_bounds_grid(long long max_n);
GridReport log_concavity_grid(long long max_a);
GridReport decay_grid(long long max_m);
GridReport stability_grid(long long max_m, long long max_p);
GridReport diag_sum_grid(long long max_n, long long max_k);

/// All d-subsets of {0, …, n−1} as bitmasks, in colexicographic order.
std::vector<std::uint64_t> colex_subsets(unsigned n, unsigned d);

class CensusBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairOverlapCensus {
  std::map<int, BigCount> enumerated;  // v ↦ #{(i, k) : |i ∩ k| = v}
  std::map<int, BigCount> formula;     // v ↦ C(n,d) C(d,v) C(n−d,d−v)
  BigCount total;
  bool matches = false;
};

PairOverlapCensus pair_overlap_census(unsigned n, unsigned d);

struct CensusCell {
  int w = 0;
  int v = 0;
  int r = 0;
  auto operator<=>(const CensusCell&) const = default;
};

struct CensusCounts {
  /// Tuples (i, j, k, l) with i ≠ j forming a double cover; l = k allowed.
  BigCount enumerated;
  /// The subset of those with k ≠ l.
  BigCount enumerated_k_ne_l;
  /// C(n,d)·C(d,v)C(n−d,d−v)·C(v,r)C(n−(2d−v),v−w)C(2(d−v),d−r−(v−w))·C(d+w−r,2w−r)
  BigCount formula;
  bool match() const { return enumerated == formula; }
};

struct MetaIndexCensus {
  unsigned n = 0;
  unsigned d = 0;
  std::map<CensusCell, CensusCounts> cells;
  std::uint64_t tuples_checked = 0;
  std::vector<std::string> violations;  // per-tuple assertion failures
  bool all_match() const;
};

BigCount census_formula(long long n, long long d, long long w, long long v, long long r);

struct CensusOptions {
  /// Enumerate l only over s ⊆ l ⊆ i∪j∪k (s = single indices of i, j, k).
  /// When false every d-subset l is tried and the double-cover filter is applied directly.
  bool prune = true;
  unsigned threads = 1;
  std::uint64_t budget = 100'000'000;
};

/// Brute-force census of ordered 4-tuples of d-subsets of [n] grouped by
/// (w, v, r) = (2d − |i∪j∪k∪l|, |i∩j|, |i∩j∩k|), checked against the product formula.
MetaIndexCensus meta_index_census(unsigned n, unsigned d, const CensusOptions& options = {});

}  // namespace mpsim

#include "mpsim/combinatorics.hpp"

#include <bit>
#include <sstream>

#include "mpsim/parallel.hpp"

namespace mpsim {

namespace {

constexpr std::size_t kMaxWitnesses = 8;

BigCount pow_big(const BigCount& base, long long e) {
  BigCount out = 1;
  for (long long i = 0; i < e; ++i) out *= base;
  return out;
}

CheckResult fail(std::string witness) { return {Verdict::Fail, std::move(witness)}; }

void tally(GridReport& report, const CheckResult& r) {
  ++report.cases;
  switch (r.verdict) {
    case Verdict::Pass: ++report.passed; break;
    case Verdict::NotApplicable: ++report.not_applicable; break;
    case Verdict::Fail:
      ++report.failed;
      if (report.failures.size() < kMaxWitnesses) report.failures.push_back(r.witness);
      break;
  }
}

}  // namespace

BigCount binom(const BigCount& n, const BigCount& k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigCount kk = k;
  if (kk > n - kk) kk = n - kk;
  BigCount result = 1;
  for (BigCount i = 1; i <= kk; ++i) {
    result *= n - kk + i;
    result /= i;
  }
  return result;
}

BigCount binom(long long n, long long k) { return binom(BigCount(n), BigCount(k)); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "?";
}

CheckResult check_lemma_bounds(long long n, long long d) {
  if (d < 1 || d > n) throw std::invalid_argument("check_lemma_bounds: need 1 <= d <= n");
  const BigCount c = binom(n, d);
  const BigCount dd = pow_big(d, d);
  BigCount partial = 0;
  for (long long k = 0; k <= d; ++k) partial += binom(n, k);
  std::ostringstream w;
  if (pow_big(n, d) > c * dd) {
    w << "(n/d)^d <= C(n,d) fails at n=" << n << " d=" << d << ": " << pow_big(n, d) << "/" << dd << " > " << c;
    return fail(w.str());
  }
  if (c > partial) {
    w << "C(n,d) <= sum fails at n=" << n << " d=" << d << ": " << c << " > " << partial;
    return fail(w.str());
  }
  const BigCount e_num("27182818285");
  const BigCount e_den("10000000000");
  if (partial * dd * pow_big(e_den, d) > pow_big(e_num * n, d)) {
    w << "sum <= (en/d)^d fails at n=" << n << " d=" << d << ": sum=" << partial;
    return fail(w.str());
  }
  return {};
}

CheckResult check_log_concavity(long long a, long long b, long long c) {
  const BigCount lhs = binom(a, b - c) * binom(a, b + c);
  const BigCount mid = binom(a, b);
  const BigCount rhs = mid * mid;
  if (lhs > rhs) {
    std::ostringstream w;
    w << "C(" << a << "," << b - c << ")*C(" << a << "," << b + c << ") = " << lhs << " > C(" << a << "," << b
      << ")^2 = " << rhs;
    return fail(w.str());
  }
  return {};
}

CheckResult check_decay(long long m, long long t, long long s) {
  if (!(1 <= s && s <= t && t <= m)) throw std::invalid_argument("check_decay: need 1 <= s <= t <= m");
  // C(m,t−s)·(m−t+1)^s ≤ t^s·C(m,t)
  const BigCount lhs = binom(m, t - s) * pow_big(m - t + 1, s);
  const BigCount rhs = pow_big(t, s) * binom(m, t);
  if (lhs > rhs) {
    std::ostringstream w;
    w << "decay fails at m=" << m << " t=" << t << " s=" << s << ": " << lhs << " > " << rhs;
    return fail(w.str());
  }
  return {};
}

CheckResult check_stability(long long m, long long p, long long t) {
  if (m < 1 || p < 1 || t < 1 || t > m) throw std::invalid_argument("check_stability: need positive m, p, t with t <= m");
  const long long denom = m + 1 - t;
  // δ = 2tp/denom ≤ ½  ⇔  4tp ≤ denom
  if (4 * t * p > denom) return {Verdict::NotApplicable, {}};
  // C(m+p,t)·denom ≤ (denom + 2tp)·C(m,t)
  const BigCount lhs = binom(m + p, t) * denom;
  const BigCount rhs = BigCount(denom + 2 * t * p) * binom(m, t);
  if (lhs > rhs) {
    std::ostringstream w;
    w << "stability fails at m=" << m << " p=" << p << " t=" << t << ": " << lhs << " > " << rhs;
    return fail(w.str());
  }
  return {};
}

CheckResult check_diag_sum(long long n, long long d, long long k) {
  if (d < 1 || 4 * d > n || k < 1) throw std::invalid_argument("check_diag_sum: need 1 <= d <= n/4 and K >= 1");
  std::ostringstream w;
  for (long long v = 0; v <= d; ++v) {
    const BigCount lhs = binom(d, v) * pow_big(k, v);
    const BigCount rhs = binom(k * d, v);
    if (lhs > rhs) {
      w << "C(d,v)K^v <= C(Kd,v) fails at d=" << d << " v=" << v << " K=" << k << ": " << lhs << " > " << rhs;
      return fail(w.str());
    }
  }
  BigCount vandermonde = 0;
  BigCount weighted = 0;
  for (long long v = 0; v <= d; ++v) {
    vandermonde += binom(k * d, v) * binom(n - d, d - v);
    if (v >= 1) weighted += binom(d, v) * binom(n - d, d - v) * pow_big(k, v);
  }
  const BigCount closed = binom(n - d + k * d, d);
  if (vandermonde != closed) {
    w << "Vandermonde fails at n=" << n << " d=" << d << " K=" << k << ": " << vandermonde << " != " << closed;
    return fail(w.str());
  }
  const BigCount bound = closed - binom(n - d, d);
  if (weighted > bound) {
    w << "diagonal sum bound fails at n=" << n << " d=" << d << " K=" << k << ": " << weighted << " > " << bound;
    return fail(w.str());
  }
  return {};
}

GridReport lemma_bounds_grid(long long max_n) {
  GridReport r;
  r.name = "lemma_bounds";
  for (long long n = 1; n <= max_n; ++n)
    for (long long d = 1; d <= n; ++d) tally(r, check_lemma_bounds(n, d));
  return r;
}

GridReport log_concavity_grid(long long max_a) {
  GridReport r;
  r.name = "log_concavity";
  for (long long a = 1; a <= max_a; ++a)
    for (long long b = 0; b <= a; ++b)
      for (long long c = 0; c <= a; ++c) tally(r, check_log_concavity(a, b, c));
  return r;
}

GridReport decay_grid(long long max_m) {
  GridReport r;
  r.name = "decay";
  for (long long m = 1; m <= max_m; ++m)
    for (long long t = 1; t <= m; ++t)
      for (long long s = 1; s <= t; ++s) tally(r, check_decay(m, t, s));
  return r;
}

GridReport stability_grid(long long max_m, long long max_p) {
  GridReport r;
  r.name = "stability";
  for (long long m = 1; m <= max_m; ++m)
    for (long long p = 1; p <= max_p; ++p)
      for (long long t = 1; t <= m; ++t) tally(r, check_stability(m, p, t));
  return r;
}

GridReport diag_sum_grid(long long max_n, long long max_k) {
  GridReport r;
  r.name = "diag_sum";
  for (long long n = 4; n <= max_n; ++n)
    for (long long d = 1; 4 * d <= n; ++d)
      for (long long k = 1; k <= max_k; ++k) tally(r, check_diag_sum(n, d, k));
  return r;
}

std::vector<std::uint64_t> colex_subsets(unsigned n, unsigned d) {
  if (n > 63) throw std::invalid_argument("colex_subsets: n must be below 64");
  std::vector<std::uint64_t> out;
  if (d > n) return out;
  if (d == 0) return {0};
  const std::uint64_t limit = std::uint64_t{1} << n;
  // Gosper's hack: increasing integers with d set bits, i.e. colex order.
  for (std::uint64_t x = (std::uint64_t{1} << d) - 1; x < limit;) {
    out.push_back(x);
    const std::uint64_t c = x & (~x + 1);
    const std::uint64_t r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return out;
}

PairOverlapCensus pair_overlap_census(unsigned n, unsigned d) {
  const auto subsets = colex_subsets(n, d);
  const BigCount pairs = BigCount(subsets.size()) * subsets.size();
  if (pairs > 10'000'000) throw CensusBudgetError("pair_overlap_census: more than 1e7 pairs");
  PairOverlapCensus out;
  std::vector<std::uint64_t> counts(d + 1, 0);
  for (auto i : subsets)
    for (auto k : subsets) ++counts[std::popcount(i & k)];
  out.matches = true;
  for (unsigned v = 0; v <= d; ++v) {
    out.enumerated[static_cast<int>(v)] = counts[v];
    out.formula[static_cast<int>(v)] = binom(n, d) * binom(d, v) * binom(n - d, d - v);
    out.total += counts[v];
    if (out.enumerated[static_cast<int>(v)] != out.formula[static_cast<int>(v)]) out.matches = false;
  }
  return out;
}

BigCount census_formula(long long n, long long d, long long w, long long v, long long r) {
  return binom(n, d) * binom(d, v) * binom(n - d, d - v) * binom(v, r) * binom(n - (2 * d - v), v - w) *
         binom(2 * (d - v), d - r - (v - w)) * binom(d + w - r, 2 * w - r);
}

bool MetaIndexCensus::all_match() const {
  if (!violations.empty()) return false;
  for (const auto& [cell, counts] : cells)
    if (!counts.match()) return false;
  return true;
}

namespace {

struct LocalCensus {
  std::map<CensusCell, std::pair<std::uint64_t, std::uint64_t>> counts;  // (all, k ≠ l)
  std::uint64_t tuples = 0;
  std::vector<std::string> violations;
};

// Per-tuple structural assertions; returns an empty string when all hold.
std::string tuple_violation(std::uint64_t i, std::uint64_t j, std::uint64_t k, std::uint64_t l, int d) {
  const std::uint64_t ijk = i | j | k;
  const std::uint64_t all = ijk | l;
  const int w = 2 * d - std::popcount(all);
  const int v = std::popcount(i & j);
  const int r = std::popcount(i & j & k);
  const std::uint64_t odd = i ^ j ^ k;
  const std::uint64_t single = odd & ~(i & j & k);
  int lambda[5] = {0, 0, 0, 0, 0};
  for (std::uint64_t bits = all; bits != 0; bits &= bits - 1) {
    const std::uint64_t bit = bits & (~bits + 1);
    const int cover = ((i & bit) != 0) + ((j & bit) != 0) + ((k & bit) != 0) + ((l & bit) != 0);
    ++lambda[cover];
  }
  std::ostringstream msg;
  auto tuple = [&] { msg << " at (i,j,k,l) = (" << i << "," << j << "," << k << "," << l << ")"; };
  if (std::popcount(ijk) != std::popcount(all)) { msg << "|ijk| != |ijkl|"; tuple(); }
  else if (lambda[1] != 0) { msg << "single-covered index"; tuple(); }
  else if (!(w <= v && v <= d - 1)) { msg << "w <= v <= d-1 fails (w=" << w << ", v=" << v << ")"; tuple(); }
  else if (!(r <= v && r <= 2 * w)) { msg << "r <= v, r <= 2w fails (r=" << r << ")"; tuple(); }
  else if (!(r <= d - v + w)) { msg << "r <= d-v+w fails"; tuple(); }
  else if (std::popcount(single) != d - 2 * w + r) { msg << "|s| != d-2w+r"; tuple(); }
  else if (2 * w != lambda[3] + 2 * lambda[4]) { msg << "2w != |L3| + 2|L4|"; tuple(); }
  else if (4 * d != 2 * lambda[2] + 3 * lambda[3] + 4 * lambda[4]) { msg << "4d != 2|L2| + 3|L3| + 4|L4|"; tuple(); }
  return msg.str();
}

bool double_cover(std::uint64_t i, std::uint64_t j, std::uint64_t k, std::uint64_t l) {
  const std::uint64_t all = i | j | k | l;
  // Indices covered at least twice: union of pairwise intersections.
  const std::uint64_t twice = (i & j) | (i & k) | (i & l) | (j & k) | (j & l) | (k & l);
  return all == twice;
}

void visit_tuple(LocalCensus& local, std::uint64_t i, std::uint64_t j, std::uint64_t k, std::uint64_t l, int d) {
  ++local.tuples;
  const int w = 2 * d - std::popcount(i | j | k | l);
  const CensusCell cell{w, std::popcount(i & j), std::popcount(i & j & k)};
  auto& entry = local.counts[cell];
  ++entry.first;
  if (k != l) ++entry.second;
  if (local.violations.size() < kMaxWitnesses) {
    auto v = tuple_violation(i, j, k, l, d);
    if (!v.empty()) local.violations.push_back(std::move(v));
  }
}

}  // namespace

MetaIndexCensus meta_index_census(unsigned n, unsigned d, const CensusOptions& options) {
  if (d < 1 || d > n) throw std::invalid_argument("meta_index_census: need 1 <= d <= n");
  const auto subsets = colex_subsets(n, d);
  const BigCount size = subsets.size();
  if (size * size * size * size > options.budget)
    throw CensusBudgetError("meta_index_census: C(n,d)^4 exceeds the enumeration budget");
  const int di = static_cast<int>(d);

  std::vector<LocalCensus> per_i(subsets.size());
  parallel_for(subsets.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      auto& local = per_i[a];
      const std::uint64_t i = subsets[a];
      for (std::uint64_t j : subsets) {
        if (j == i) continue;
        for (std::uint64_t k : subsets) {
          const std::uint64_t ijk = i | j | k;
          if (!options.prune) {
            for (std::uint64_t l : subsets)
              if (double_cover(i, j, k, l)) visit_tuple(local, i, j, k, l, di);
            continue;
          }
          const std::uint64_t single = (i ^ j ^ k) & ~(i & j & k);
          const int free = di - std::popcount(single);
          if (free < 0) continue;
          const std::uint64_t pool = ijk & ~single;
          for (std::uint64_t sub = pool;; sub = (sub - 1) & pool) {
            if (std::popcount(sub) == free) visit_tuple(local, i, j, k, single | sub, di);
            if (sub == 0) break;
          }
        }
      }
    }
  });

  MetaIndexCensus census;
  census.n = n;
  census.d = d;
  for (auto& local : per_i) {
    census.tuples_checked += local.tuples;
    for (const auto& [cell, counts] : local.counts) {
      auto& target = census.cells[cell];
      target.enumerated += counts.first;
      target.enumerated_k_ne_l += counts.second;
    }
    for (auto& v : local.violations)
      if (census.violations.size() < kMaxWitnesses) census.violations.push_back(std::move(v));
  }
  for (int w = 0; w <= di; ++w)
    for (int v = 0; v < di; ++v)
      for (int r = 0; r <= di; ++r) {
        BigCount f = census_formula(n, d, w, v, r);
        if (f != 0) census.cells[{w, v, r}].formula = f;
      }
  for (auto& [cell, counts] : census.cells)
    if (counts.formula == 0) counts.formula = census_formula(n, d, cell.w, cell.v, cell.r);
  return census;
}

}  // namespace mpsim

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "mpsim/combinatorics.hpp"
#include "mpsim/concentration.hpp"
#include "mpsim/experiment.hpp"
#include "mpsim/quadrature.hpp"

using namespace mpsim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.c_str(), secs, limit_seconds, in_time ? "" : " over time limit");
  std::fflush(stdout);
}

double ks_of(const MatrixModel& model, const Comparison& law, std::uint64_t seed = kDefaultSeed) {
  ExperimentConfig c;
  c.model = model;
  c.seed = seed;
  c.comparison = law;
  c.threads = 4;
  return simulate_in_memory(c).ks_distance;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "MP normalization", 1.0, [] {
    double worst = 0.0;
    for (double lambda : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0})
      for (double sigma2 : {0.25, 1.0}) {
        const MpLaw law(lambda, sigma2);
        const double a = law.lower_edge(), b = law.upper_edge();
        const auto q = integrate_adaptive(
            [&](double t) {
              const double s = std::sin(t), c = std::cos(t);
              return mp_density(a + (b - a) * s * s, law) * 2.0 * (b - a) * s * c;
            },
            0.0, std::numbers::pi / 2, 1e-13);
        worst = std::max(worst, std::abs(q.value - (1.0 - law.atom_at_zero())));
      }
    return Outcome{worst <= 1e-8, fmt("max |integral - (1 - atom)| = %.3g", worst)};
  });

  criterion(2, "Stieltjes consistency with H = delta_1", 5.0, [] {
    double worst = 0.0;
    for (double lambda : {1.0 / 7.0, 0.25, 1.0}) {
      const MpLaw law(lambda);
      const auto h = SpectralMixture::point_mass(1.0);
      for (int k = 0; k < 200; ++k) {
        const double x = law.lower_edge() + (law.upper_edge() - law.lower_edge()) * (k + 0.5) / 200.0;
        worst = std::max(worst, std::abs(density_from_stieltjes(x, lambda, h) - mp_density(x, law)));
      }
    }
    return Outcome{worst <= 5e-4, fmt("max pointwise gap %.3g over 600 points", worst)};
  });

  criterion(3, "Figure 1a desk scale (GaussianHermite p=1000, m=4000)", 120.0, [] {
    const MatrixModel model{repeat_block(GaussianHermite{}, 500), 4000};
    const MatrixModel control{IidModel{1000, EntryLaw::StdNormal}, 4000};
    const double ks = ks_of(model, MpComparison{0.25, 1.0});
    const double ks_control = ks_of(control, MpComparison{0.25, 1.0});
    return Outcome{ks <= 0.05 && ks_control <= 0.05, fmt("KS %.4g, iid Gaussian control %.4g", ks, ks_control)};
  });

  criterion(4, "Figure 1b desk scale (XorTriple p=900, m=6300)", 120.0, [] {
    const double ks = ks_of({repeat_block(XorTriple{}, 300), 6300}, MpComparison{1.0 / 7.0, 0.25});
    return Outcome{ks <= 0.06, fmt("KS to MP(1/7, 1/4) = %.4g", ks)};
  });

  criterion(5, "BasisVector blocks (10 x 100, m=3000)", 120.0, [] {
    const double ks = ks_of({repeat_block(BasisVector{100}, 10), 3000}, MpComparison{1.0 / 3.0, 1.0});
    return Outcome{ks <= 0.08, fmt("KS to MP(1/3) = %.4g", ks)};
  });

  criterion(6, "Figure 2 desk scale (Tensor n=60, d=2, m=2p)", 300.0, [] {
    const std::size_t p = binomial_u64(60, 2);
    const double rad = ks_of({TensorModel{60, 2, EntryLaw::Rademacher}, 2 * p}, MpComparison{0.5, 1.0});
    const double nor = ks_of({TensorModel{60, 2, EntryLaw::StdNormal}, 2 * p}, MpComparison{0.5, 1.0});
    return Outcome{rad <= 0.08 && rad <= nor, fmt("KS Rademacher %.4g, StdNormal %.4g", rad, nor)};
  });

  criterion(7, "Block variance bound (20 random A, GaussianHermite p=200)", 180.0, [] {
    const BlockModel model = repeat_block(GaussianHermite{}, 100);
    const SeedSpec seeds(kDefaultSeed);
    double worst_gap = -1e300, bound = 0.0;
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      Stream s = seeds.child(1).stream(t);
      const DenseMatrix a = random_symmetric_unit_norm(200, s);
      const auto r = var_quadform_mc(model, a, 10000, seeds.child(2).child(t), {{}, 4});
      bound = bound_block(r.spectral_norm, 15.0, block_sizes(model));
      ok = ok && r.bound_kind == BoundKind::Block && r.theoretical_bound == bound &&
           r.mc_variance - 4.0 * r.mc_stderr <= bound;
      worst_gap = std::max(worst_gap, r.mc_variance - 4.0 * r.mc_stderr);
    }
    return Outcome{ok, fmt("max (MC var - 4 se) = %.4g vs bound %.4g", worst_gap, bound)};
  });

  criterion(8, "Diagonal/off-diagonal decomposition (10 pairs)", 120.0, [] {
    const std::vector<BlockModel> models = {repeat_block(GaussianHermite{}, 50), repeat_block(XorTriple{}, 30),
                                            repeat_block(BasisVector{10}, 8),
                                            repeat_block(IidBlock{4, EntryLaw::UniformSqrt3}, 20),
                                            repeat_block(IidBlock{2, EntryLaw::StdNormal}, 40)};
    const SeedSpec seeds(kDefaultSeed);
    int additive = 0;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto& model = models[t % models.size()];
      Stream s = seeds.child(3).stream(t);
      const DenseMatrix a = random_symmetric_unit_norm(dimension(model), s);
      const auto r = decomposition_check(model, a, 20000, seeds.child(4).child(t), 4);
      additive += r.additive;
      worst = std::max(worst, std::abs(r.discrepancy) / r.combined_stderr);
    }
    return Outcome{additive == 10, fmt("%.0f/10 additive, worst |disc|/se = %.3g", additive, worst)};
  });

  criterion(9, "Binomial lemma grids", 30.0, [] {
    const std::vector<GridReport> grids = {lemma_bounds_grid(40), log_concavity_grid(40), decay_grid(40),
                                           stability_grid(40, 5), diag_sum_grid(40, 4)};
    std::size_t cases = 0, failed = 0;
    for (const auto& g : grids) {
      cases += g.cases;
      failed += g.failed;
    }
    return Outcome{failed == 0, fmt("%.0f cases, %.0f failures", static_cast<double>(cases), static_cast<double>(failed))};
  });

  criterion(10, "Meta-index census", 300.0, [] {
    bool ok = true;
    std::uint64_t tuples = 0;
    CensusOptions options;
    options.threads = 4;
    for (auto [n, d] : {std::pair{5u, 2u}, {6u, 2u}, {7u, 2u}, {8u, 2u}, {6u, 3u}}) {
      const auto c = meta_index_census(n, d, options);
      ok = ok && c.all_match() && c.violations.empty() && pair_overlap_census(n, d).matches;
      tuples += c.tuples_checked;
    }
    return Outcome{ok, fmt("%.0f double-cover tuples checked", static_cast<double>(tuples))};
  });

  criterion(11, "Yaskov counterexample (2 blocks)", 30.0, [] {
    const auto r = yaskov_counterexample(repeat_block(GaussianHermite{}, 2), 10000, SeedSpec(kDefaultSeed));
    const double gap = std::abs(r.zero_fraction - 0.25);
    return Outcome{gap <= 3.0 * r.binomial_stderr,
                   fmt("P(x = 0) = %.4f, band 0.25 +/- %.4f", r.zero_fraction, 3.0 * r.binomial_stderr)};
  });

  criterion(12, "Hoeffding lower bound (Tensor n=20, d=3, uniform)", 60.0, [] {
    const auto st = norm_statistic(TensorModel{20, 3, EntryLaw::UniformSqrt3}, 10000, SeedSpec(kDefaultSeed));
    const double bound = hoeffding_lower_bound(20, 3, EntryLaw::UniformSqrt3);
    return Outcome{st.variance >= bound - 4.0 * st.variance_stderr,
                   fmt("Var(U_p) = %.4f (se %.4f) vs bound %.4f", st.variance, st.variance_stderr, bound)};
  });

  criterion(13, "Determinism of simulate", 60.0, [] {
    const auto base = std::filesystem::temp_directory_path() / "mpsim_acceptance";
    std::filesystem::remove_all(base);
    ExperimentConfig c;
    c.model = figure_model("1b", 0.25);
    c.seed = 4242;
    c.output_dir = base / "one";
    run_simulate(c);
    c.output_dir = base / "two";
    c.threads = 4;
    run_simulate(c);
    const std::string one = slurp(base / "one" / "eigenvalues.csv");
    const bool same = !one.empty() && one == slurp(base / "two" / "eigenvalues.csv");
    return Outcome{same, fmt("%.0f bytes, identical = %.0f", static_cast<double>(one.size()), same)};
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

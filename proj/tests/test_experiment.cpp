#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mpsim/experiment.hpp"

using namespace mpsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mpsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("figure presets at full scale") {
  const auto f1a = figure_model("1a", 1.0);
  CHECK(dimension(f1a.column) == 4000);
  CHECK(f1a.m == 16000);
  CHECK(std::get<BlockModel>(f1a.column).blocks.size() == 2000);

  const auto f1b = figure_model("figure1b", 1.0);
  CHECK(dimension(f1b.column) == 1800);
  CHECK(f1b.m == 12600);
  const auto cmp = std::get<MpComparison>(default_comparison(f1b));
  CHECK(cmp.lambda == doctest::Approx(1.0 / 7.0));
  CHECK(cmp.sigma2 == doctest::Approx(0.25));

  const auto f2 = figure_model("2", 1.0);
  const auto& t = std::get<TensorModel>(f2.column);
  CHECK(t.n == 145);
  CHECK(t.d == 2);
  CHECK(t.law == EntryLaw::Rademacher);
  CHECK(f2.m == 2 * 10440);

  const auto f3 = figure_model("3", 1.0, EntryLaw::StdNormal);
  CHECK(dimension(f3.column) == 14190);
  CHECK(f3.m == 2 * 14190);

  const auto desk = figure_model("1a", 0.25);
  CHECK(dimension(desk.column) == 1000);
  CHECK(desk.m == 4000);

  CHECK_THROWS_AS(figure_model("9", 1.0), ConfigError);
  CHECK_THROWS_AS(figure_model("1a", 1.5), ConfigError);
  CHECK_THROWS_AS(figure_model("1a", 0.0), ConfigError);
}

TEST_CASE("config parsing") {
  const Json j = Json::parse(R"({
    "name": "xor",
    "model": {"type": "block", "blocks": [{"kind": "xor_triple", "count": 10}], "lambda": 0.5},
    "seed": 7,
    "histogram_bins": 40,
    "output_dir": "somewhere",
    "comparison": {"type": "mp", "lambda": 0.5, "sigma2": 0.25}
  })");
  const auto c = parse_config(j);
  CHECK(c.name == "xor");
  CHECK(dimension(c.model.column) == 30);
  CHECK(c.model.m == 60);
  CHECK(c.seed == 7);
  CHECK(c.histogram_bins == 40);
  CHECK(c.output_dir == "somewhere");
  REQUIRE(c.comparison.has_value());
  CHECK(std::get<MpComparison>(*c.comparison).sigma2 == 0.25);

  const auto round = parse_config(config_to_json(c));
  CHECK(model_to_json(round.model) == model_to_json(c.model));
  CHECK(round.seed == c.seed);
}

TEST_CASE("model schema round trip") {
  const std::vector<std::string> models = {
      R"({"type": "iid", "p": 12, "law": "uniform", "m": 30})",
      R"({"type": "tensor", "n": 9, "d": 3, "law": "rademacher", "m": 100})",
      R"({"type": "block", "blocks": [{"kind": "gaussian_hermite", "count": 3},
          {"kind": "basis_vector", "dim": 4, "count": 2}, {"kind": "iid", "dim": 5, "law": "normal"}], "m": 50})",
  };
  for (const auto& text : models) {
    const auto model = parse_model(Json::parse(text));
    const auto again = parse_model(model_to_json(model));
    CHECK(model_to_json(again) == model_to_json(model));
    CHECK(dimension(again.column) == dimension(model.column));
  }
}

TEST_CASE("config errors") {
  auto bad = [](const char* text) { return parse_config(Json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4, "m": 4}, "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4, "m": 4, "lambda": 1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "tensor", "n": 3, "d": 4, "m": 4}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4, "m": 4}, "scale_factor": 2})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": "four", "m": 4}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4, "m": 4, "law": "cauchy"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"type": "iid", "p": 4, "m": 4},
                         "comparison": {"type": "anisotropic", "lambda": 1, "atoms": [[1, 0.3]]}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"([1, 2])"), ConfigError);
}

TEST_CASE("default comparison for mixed variances is anisotropic") {
  const MatrixModel model{BlockModel{{XorTriple{}, GaussianHermite{}}}, 10};
  const auto c = std::get<AnisotropicComparison>(default_comparison(model));
  CHECK(c.lambda == doctest::Approx(0.5));
  REQUIRE(c.atoms.size() == 2);
  CHECK(c.atoms[0].location == 0.25);
  CHECK(c.atoms[0].weight == doctest::Approx(0.6));
  CHECK(c.atoms[1].location == 1.0);
}

TEST_CASE("histogram integrates to one") {
  const std::vector<double> values = {0.1, 0.5, 0.5, 2.0, 3.7, 3.7, 3.7, 1.2};
  for (std::size_t bins : {1u, 3u, 100u}) {
    const auto h = make_histogram(values, bins);
    CHECK(std::abs(h.integral() - 1.0) <= 1e-9);
    CHECK(h.left.front() == 0.1);
    CHECK(h.right.back() == 3.7);
  }
  const auto flat = make_histogram(std::vector<double>(5, 2.0), 10);
  CHECK(std::abs(flat.integral() - 1.0) <= 1e-9);
}

TEST_CASE("simulate writes deterministic outputs") {
  ExperimentConfig c;
  c.model = {repeat_block(GaussianHermite{}, 60), 480};
  c.seed = 99;
  const fs::path dir_a = scratch("a"), dir_b = scratch("b");
  c.output_dir = dir_a;
  const auto first = run_simulate(c);
  c.output_dir = dir_b;
  const auto second = run_simulate(c);
  for (const char* name : {"eigenvalues.csv", "histogram.csv", "theory.csv"})
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  CHECK(first.eigenvalues == second.eigenvalues);
  CHECK(first.p == 120);
  CHECK(first.spectrum_residuals_ok);
  CHECK(std::abs(first.histogram.integral() - 1.0) <= 1e-9);

  const auto csv = slurp(first.eigenvalues_csv);
  CHECK(csv.rfind("eigenvalue\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 121);
  CHECK(slurp(first.histogram_csv).rfind("bin_left,bin_right,density\n", 0) == 0);
  CHECK(slurp(first.theory_csv).rfind("x,density\n", 0) == 0);

  const Json result = Json::parse(slurp(first.result_json));
  CHECK(result["config"]["seed"] == 99);
  CHECK(result["ks_distance"].get<double>() == first.ks_distance);
  CHECK(result.contains("wall_seconds"));

  c.seed = 100;
  CHECK(simulate_in_memory(c).eigenvalues != first.eigenvalues);
}

TEST_CASE("anisotropic comparison in simulate") {
  BlockModel blocks;
  for (int k = 0; k < 40; ++k) {
    blocks.blocks.push_back(XorTriple{});
    blocks.blocks.push_back(GaussianHermite{});
  }
  ExperimentConfig c;
  c.model = {blocks, 1000};
  const auto r = simulate_in_memory(c);
  CHECK(r.ks_distance < 0.1);
}

TEST_CASE("density curves") {
  SUBCASE("MP shape") {
    const auto rows = run_density({MpComparison{0.25, 1.0}, 0.0, 2.5, 1000});
    REQUIRE(rows.size() == 1000);
    const auto peak = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK(peak->first < 1.0);
    CHECK(rows.front().second == 0.0);
  }
  SUBCASE("support of MP(1/7, 1/4)") {
    const double lo = 0.25 * std::pow(1 - 1 / std::sqrt(7.0), 2), hi = 0.25 * std::pow(1 + 1 / std::sqrt(7.0), 2);
    for (const auto& [x, f] : run_density({MpComparison{1.0 / 7.0, 0.25}, 0.0, 0.6, 601})) {
      if (x < lo || x > hi) CHECK(f == 0.0);
      if (x > lo + 1e-3 && x < hi - 1e-3) CHECK(f > 0.0);
    }
  }
  SUBCASE("Stieltjes path for a point mass") {
    const auto mp = run_density({MpComparison{0.25, 1.0}, 0.0, 2.5, 200});
    const auto st = run_density({AnisotropicComparison{0.25, {{1.0, 1.0}}}, 0.0, 2.5, 200});
    for (std::size_t k = 0; k < mp.size(); ++k) CHECK(std::abs(mp[k].second - st[k].second) < 5e-4);
  }
  CHECK_THROWS_AS(run_density({MpComparison{0.25, 1.0}, 1.0, 1.0, 10}), ConfigError);
}

TEST_CASE("verify suites") {
  VerifyOptions o;
  o.threads = 4;
  CHECK(run_verify("lemmas", o)["passed"] == true);
  o.n = 6;
  o.d = 2;
  const Json census = run_verify("census", o);
  CHECK(census["passed"] == true);
  CHECK(census["runs"].size() == 1);
  o.n.reset();
  o.d.reset();
  CHECK(run_verify("yaskov", o)["passed"] == true);
  CHECK(run_verify("isotropy", o)["passed"] == true);
  const Json vb = run_verify("varbounds", o);
  CHECK(vb["passed"] == true);
  for (const auto& r : vb["reports"]) CHECK(r["bound_kind"] == "block");
  CHECK_THROWS_AS(run_verify("nonsense", o), ConfigError);
}

TEST_CASE("census csv") {
  bool ok = false;
  const std::string csv = census_csv(4, 2, 1, &ok);
  CHECK(ok);
  CHECK(csv.rfind("w,v,r,enumerated,formula,match", 0) == 0);
  CHECK(csv.find("\n0,0,0,36,36,true,36\n") != std::string::npos);
}

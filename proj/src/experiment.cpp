#include "mpsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mpsim/combinatorics.hpp"
#include "mpsim/concentration.hpp"
#include "mpsim/linalg.hpp"

namespace mpsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <typename T>
T get_required(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(where) + ": bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(where) + ": bad value for '" + key + "': " + e.what());
  }
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
}

EntryLaw parse_law(const Json& j, const char* where) {
  try {
    return entry_law_from_string(get_or<std::string>(j, "law", "normal", where));
  } catch (const ModelError& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
}

std::size_t resolve_columns(const Json& j, std::size_t p, const char* where) {
  if (j.contains("m") && j.contains("lambda"))
    throw ConfigError(std::string(where) + ": give either 'm' or 'lambda', not both");
  if (j.contains("m")) {
    const auto m = get_required<std::int64_t>(j, "m", where);
    if (m < 1) throw ConfigError(std::string(where) + ": m must be at least 1");
    return static_cast<std::size_t>(m);
  }
  if (j.contains("lambda")) {
    const double lambda = get_required<double>(j, "lambda", where);
    if (!(lambda > 0.0)) throw ConfigError(std::string(where) + ": lambda must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(p) / lambda)));
  }
  throw ConfigError(std::string(where) + ": missing 'm' (or 'lambda')");
}

std::size_t positive_count(const Json& j, const char* key, const char* where, std::int64_t fallback = -1) {
  const auto v = fallback < 0 ? get_required<std::int64_t>(j, key, where) : get_or<std::int64_t>(j, key, fallback, where);
  if (v < 1) throw ConfigError(std::string(where) + ": '" + key + "' must be at least 1");
  return static_cast<std::size_t>(v);
}

BlockKind parse_block_kind(const Json& j) {
  const char* where = "block";
  const auto kind = get_required<std::string>(j, "kind", where);
  if (kind == "gaussian_hermite") return GaussianHermite{};
  if (kind == "xor_triple") return XorTriple{};
  if (kind == "basis_vector") return BasisVector{positive_count(j, "dim", where)};
  if (kind == "iid") return IidBlock{positive_count(j, "dim", where), parse_law(j, where)};
  throw ConfigError("block: unknown kind '" + kind + "'");
}

Json block_kind_to_json(const BlockKind& kind) {
  return std::visit(overloaded{[](const GaussianHermite&) { return Json{{"kind", "gaussian_hermite"}}; },
                               [](const XorTriple&) { return Json{{"kind", "xor_triple"}}; },
                               [](const BasisVector& b) { return Json{{"kind", "basis_vector"}, {"dim", b.dim}}; },
                               [](const IidBlock& b) {
                                 return Json{{"kind", "iid"}, {"dim", b.dim}, {"law", to_string(b.law)}};
                               }},
                    kind);
}

bool same_kind(const BlockKind& a, const BlockKind& b) { return block_kind_to_json(a) == block_kind_to_json(b); }

std::size_t largest_n_with_binomial_at_most(std::size_t d, double target) {
  std::size_t n = d;
  while (static_cast<double>(binomial_u64(n + 1, d)) <= target) ++n;
  return n;
}

}  // namespace

std::vector<std::string> figure_ids() { return {"1a", "1b", "1c", "1d", "2", "3", "4"}; }

MatrixModel figure_model(const std::string& name, double s, EntryLaw law) {
  const std::string id = name.starts_with("figure") ? name.substr(6) : name;
  if (!(s > 0.0 && s <= 1.0)) throw ConfigError("scale_factor must lie in (0, 1]");
  auto scaled = [&](double full) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(full * s))); };
  if (id == "1a") {
    const std::size_t blocks = scaled(2000);
    return {repeat_block(GaussianHermite{}, blocks), 4 * 2 * blocks};
  }
  if (id == "1b") {
    const std::size_t blocks = scaled(600);
    return {repeat_block(XorTriple{}, blocks), 7 * 3 * blocks};
  }
  if (id == "1c") {
    const std::size_t dim = scaled(700);
    return {repeat_block(BasisVector{dim}, 10), 3 * 10 * dim};
  }
  if (id == "1d") {
    const std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(80.0 * std::sqrt(s))));
    return {repeat_block(BasisVector{side}, side), 2 * side * side};
  }
  if (id == "2") {
    const std::size_t n = largest_n_with_binomial_at_most(2, s * static_cast<double>(binomial_u64(145, 2)));
    return {TensorModel{n, 2, law}, 2 * binomial_u64(n, 2)};
  }
  if (id == "3") {
    const std::size_t n = largest_n_with_binomial_at_most(3, s * static_cast<double>(binomial_u64(45, 3)));
    return {TensorModel{n, 3, law}, 2 * binomial_u64(n, 3)};
  }
  if (id == "4") {
    const std::size_t n = largest_n_with_binomial_at_most(3, s * static_cast<double>(binomial_u64(100, 3)));
    const auto p = binomial_u64(n, 3);
    return {TensorModel{n, 3, EntryLaw::UniformSqrt3}, std::max<std::uint64_t>(1, p / 7)};
  }
  throw ConfigError("unknown figure '" + name + "'");
}

MatrixModel parse_model(const Json& j, double scale_factor) {
  const char* where = "model";
  if (!j.is_object()) throw ConfigError("model: expected an object");
  if (j.contains("preset")) {
    reject_unknown(j, {"preset", "law", "m", "lambda"}, where);
    MatrixModel model = figure_model(get_required<std::string>(j, "preset", where), scale_factor,
                                     j.contains("law") ? parse_law(j, where) : EntryLaw::Rademacher);
    if (j.contains("m") || j.contains("lambda")) model.m = resolve_columns(j, dimension(model.column), where);
    return model;
  }
  const auto type = get_required<std::string>(j, "type", where);
  MatrixModel model{IidModel{1, EntryLaw::StdNormal}, 1};
  if (type == "iid") {
    reject_unknown(j, {"type", "p", "law", "m", "lambda"}, where);
    model.column = IidModel{positive_count(j, "p", where), parse_law(j, where)};
  } else if (type == "block") {
    reject_unknown(j, {"type", "blocks", "m", "lambda"}, where);
    BlockModel blocks;
    for (const auto& b : get_required<Json>(j, "blocks", where)) {
      const auto count = positive_count(b, "count", "block", 1);
      const BlockKind kind = parse_block_kind(b);
      blocks.blocks.insert(blocks.blocks.end(), count, kind);
    }
    model.column = std::move(blocks);
  } else if (type == "tensor") {
    reject_unknown(j, {"type", "n", "d", "law", "m", "lambda"}, where);
    model.column = TensorModel{positive_count(j, "n", where), positive_count(j, "d", where), parse_law(j, where)};
  } else {
    throw ConfigError("model: unknown type '" + type + "'");
  }
  try {
    validate(model.column);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  model.m = resolve_columns(j, dimension(model.column), where);
  return model;
}

Json model_to_json(const MatrixModel& model) {
  Json j = std::visit(
      overloaded{[](const IidModel& m) { return Json{{"type", "iid"}, {"p", m.p}, {"law", to_string(m.law)}}; },
                 [](const BlockModel& m) {
                   Json blocks = Json::array();
                   std::size_t i = 0;
                   while (i < m.blocks.size()) {
                     std::size_t k = i;
                     while (k < m.blocks.size() && same_kind(m.blocks[k], m.blocks[i])) ++k;
                     Json b = block_kind_to_json(m.blocks[i]);
                     b["count"] = k - i;
                     blocks.push_back(b);
                     i = k;
                   }
                   return Json{{"type", "block"}, {"blocks", blocks}};
                 },
                 [](const TensorModel& m) {
                   return Json{{"type", "tensor"}, {"n", m.n}, {"d", m.d}, {"law", to_string(m.law)}};
                 }},
      model.column);
  j["m"] = model.m;
  return j;
}

Comparison default_comparison(const MatrixModel& model) {
  const double lambda = static_cast<double>(dimension(model.column)) / static_cast<double>(model.m);
  const auto variances = entry_variances(model.column);
  std::map<double, std::size_t> histogram;
  for (double v : variances) ++histogram[v];
  if (histogram.size() == 1) return MpComparison{lambda, histogram.begin()->first};
  AnisotropicComparison c{lambda, {}};
  for (const auto& [value, count] : histogram)
    c.atoms.push_back({value, static_cast<double>(count) / static_cast<double>(variances.size())});
  return c;
}

Json comparison_to_json(const Comparison& c) {
  return std::visit(overloaded{[](const MpComparison& mp) {
                                 return Json{{"type", "mp"}, {"lambda", mp.lambda}, {"sigma2", mp.sigma2}};
                               },
                               [](const AnisotropicComparison& a) {
                                 Json atoms = Json::array();
                                 for (const auto& atom : a.atoms) atoms.push_back({atom.location, atom.weight});
                                 return Json{{"type", "anisotropic"}, {"lambda", a.lambda}, {"atoms", atoms}};
                               }},
                    c);
}

namespace {

Comparison parse_comparison(const Json& j) {
  const char* where = "comparison";
  const auto type = get_or<std::string>(j, "type", "mp", where);
  const double lambda = get_required<double>(j, "lambda", where);
  if (!(lambda > 0.0)) throw ConfigError("comparison: lambda must be positive");
  if (type == "mp") {
    reject_unknown(j, {"type", "lambda", "sigma2"}, where);
    const double sigma2 = get_or<double>(j, "sigma2", 1.0, where);
    if (!(sigma2 > 0.0)) throw ConfigError("comparison: sigma2 must be positive");
    return MpComparison{lambda, sigma2};
  }
  if (type == "anisotropic") {
    reject_unknown(j, {"type", "lambda", "atoms"}, where);
    AnisotropicComparison c{lambda, {}};
    for (const auto& atom : get_required<Json>(j, "atoms", where)) {
      if (!atom.is_array() || atom.size() != 2) throw ConfigError("comparison: atoms are [location, weight] pairs");
      c.atoms.push_back({atom[0].get<double>(), atom[1].get<double>()});
    }
    try {
      SpectralMixture check(c.atoms);
    } catch (const MpLawError& e) {
      throw ConfigError(std::string("comparison: ") + e.what());
    }
    return c;
  }
  throw ConfigError("comparison: unknown type '" + type + "'");
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  const char* where = "config";
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(j,
                 {"name", "model", "seed", "histogram_bins", "output_dir", "comparison", "scale_factor",
                  "memory_cap", "threads"},
                 where);
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name, where);
  c.scale_factor = get_or<double>(j, "scale_factor", 1.0, where);
  if (!(c.scale_factor > 0.0 && c.scale_factor <= 1.0)) throw ConfigError("config: scale_factor must lie in (0, 1]");
  c.model = parse_model(get_required<Json>(j, "model", where), c.scale_factor);
  c.seed = get_or<std::uint64_t>(j, "seed", kDefaultSeed, where);
  c.histogram_bins = positive_count(j, "histogram_bins", where, 100);
  c.output_dir = get_or<std::string>(j, "output_dir", "out", where);
  if (j.contains("comparison")) c.comparison = parse_comparison(j.at("comparison"));
  c.memory_cap = get_or<std::uint64_t>(j, "memory_cap", kDefaultMemoryCap, where);
  c.threads = static_cast<unsigned>(positive_count(j, "threads", where, 1));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

Json config_to_json(const ExperimentConfig& config) {
  return Json{{"name", config.name},
              {"model", model_to_json(config.model)},
              {"seed", config.seed},
              {"histogram_bins", config.histogram_bins},
              {"output_dir", config.output_dir.string()},
              {"comparison", comparison_to_json(config.comparison.value_or(default_comparison(config.model)))},
              {"scale_factor", config.scale_factor},
              {"memory_cap", config.memory_cap},
              {"threads", config.threads}};
}

double Histogram::integral() const {
  double total = 0.0;
  for (std::size_t b = 0; b < density.size(); ++b) total += density[b] * (right[b] - left[b]);
  return total;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty() || bins == 0) throw std::invalid_argument("make_histogram: need values and bins");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  Histogram h;
  const double total = static_cast<double>(values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    const double left = lo + width * static_cast<double>(b);
    const double right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    h.left.push_back(left);
    h.right.push_back(right);
    h.density.push_back(static_cast<double>(counts[b]) / (total * (right - left)));
  }
  return h;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      out << format_double(columns[c][r]);
    }
    out << '\n';
  }
}

namespace {

struct LawView {
  std::optional<MpLaw> mp;
  std::optional<AnisotropicLaw> aniso;
  double lower = 0.0;
  double upper = 0.0;

  double ks(const Esd& e) const { return mp ? ks_distance(e, *mp) : ks_distance(e, *aniso); }
  double density(double x) const { return mp ? mp_density(x, *mp) : aniso->density(x); }
};

LawView make_law(const Comparison& c) {
  LawView view;
  std::visit(overloaded{[&](const MpComparison& mp) {
                          view.mp.emplace(mp.lambda, mp.sigma2);
                          view.lower = view.mp->lower_edge();
                          view.upper = view.mp->upper_edge();
                        },
                        [&](const AnisotropicComparison& a) {
                          SpectralMixture h(a.atoms);
                          const double root = std::sqrt(a.lambda);
                          view.lower = a.lambda < 1.0 ? h.min_location() * (1.0 - root) * (1.0 - root) : 0.0;
                          view.upper = h.max_location() * (1.0 + root) * (1.0 + root);
                          view.aniso.emplace(a.lambda, std::move(h));
                        }},
             c);
  return view;
}

}  // namespace

ExperimentResult simulate_in_memory(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  const Comparison comparison = config.comparison.value_or(default_comparison(config.model));
  const DenseMatrix x = build_matrix(config.model, SeedSpec(config.seed), {config.memory_cap, config.threads});
  result.p = x.rows();
  result.m = x.cols();
  const DenseMatrix w = sample_covariance(x);
  const Spectrum spectrum = eigvalsh(w);
  result.spectrum_residuals_ok = spectrum_residuals(w, spectrum).ok();
  result.eigenvalues = spectrum.eigenvalues;
  const LawView law = make_law(comparison);
  result.ks_distance = law.ks(Esd(result.eigenvalues));
  result.histogram = make_histogram(result.eigenvalues, config.histogram_bins);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.summary = Json{{"name", config.name},
                        {"p", result.p},
                        {"m", result.m},
                        {"aspect_ratio", static_cast<double>(result.p) / static_cast<double>(result.m)},
                        {"ks_distance", result.ks_distance},
                        {"eigenvalue_min", spectrum.min()},
                        {"eigenvalue_max", spectrum.max()},
                        {"support", {law.lower, law.upper}},
                        {"histogram_integral", result.histogram.integral()},
                        {"spectrum_residuals_ok", result.spectrum_residuals_ok},
                        {"wall_seconds", result.wall_seconds},
                        {"config", config_to_json(config)}};
  return result;
}

ExperimentResult run_simulate(const ExperimentConfig& config) {
  ExperimentResult result = simulate_in_memory(config);
  const Comparison comparison = config.comparison.value_or(default_comparison(config.model));
  const LawView law = make_law(comparison);
  std::filesystem::create_directories(config.output_dir);
  result.eigenvalues_csv = config.output_dir / "eigenvalues.csv";
  result.histogram_csv = config.output_dir / "histogram.csv";
  result.theory_csv = config.output_dir / "theory.csv";
  result.result_json = config.output_dir / "result.json";
  write_csv(result.eigenvalues_csv, "eigenvalue", {result.eigenvalues});
  write_csv(result.histogram_csv, "bin_left,bin_right,density",
            {result.histogram.left, result.histogram.right, result.histogram.density});

  constexpr std::size_t kTheoryPoints = 1000;
  const double lo = std::min(result.histogram.left.front(), law.lower);
  const double hi = std::max(result.histogram.right.back(), law.upper);
  std::vector<double> xs(kTheoryPoints), fs(kTheoryPoints);
  for (std::size_t k = 0; k < kTheoryPoints; ++k) {
    xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kTheoryPoints - 1);
    fs[k] = law.density(xs[k]);
  }
  write_csv(result.theory_csv, "x,density", {xs, fs});

  std::ofstream(result.result_json, std::ios::binary) << result.summary.dump(2) << '\n';
  return result;
}

std::vector<std::pair<double, double>> run_density(const DensityRequest& request) {
  if (request.points < 2) throw ConfigError("density: need at least two grid points");
  if (!(request.x_max > request.x_min)) throw ConfigError("density: x_max must exceed x_min");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(request.points);
  const double step = (request.x_max - request.x_min) / static_cast<double>(request.points - 1);
  std::visit(overloaded{[&](const MpComparison& mp) {
                          const MpLaw law(mp.lambda, mp.sigma2);
                          for (std::size_t k = 0; k < request.points; ++k) {
                            const double x = request.x_min + step * static_cast<double>(k);
                            rows.emplace_back(x, mp_density(x, law));
                          }
                        },
                        [&](const AnisotropicComparison& a) {
                          const SpectralMixture h(a.atoms);
                          for (std::size_t k = 0; k < request.points; ++k) {
                            const double x = request.x_min + step * static_cast<double>(k);
                            rows.emplace_back(x, density_from_stieltjes(x, a.lambda, h, request.eta));
                          }
                        }},
             request.law);
  return rows;
}

// ---------------------------------------------------------------------------
// Verification suites

namespace {

Json grid_to_json(const GridReport& g) {
  return Json{{"name", g.name},         {"cases", g.cases},
              {"passed", g.passed},     {"failed", g.failed},
              {"not_applicable", g.not_applicable}, {"failures", g.failures}};
}

Json quadform_to_json(const QuadFormReport& r) {
  return Json{{"mc_variance", r.mc_variance},
              {"mc_stderr", r.mc_stderr},
              {"samples", r.samples},
              {"theoretical_bound", r.theoretical_bound},
              {"bound_kind", to_string(r.bound_kind)},
              {"mean", r.mean},
              {"spectral_norm", r.spectral_norm},
              {"fourth_moment", r.fourth_moment},
              {"trivial_bound", r.trivial_bound}};
}

}  // namespace

Json lemmas_report() {
  const std::vector<GridReport> grids = {lemma_bounds_grid(60), log_concavity_grid(40), decay_grid(40),
                                         stability_grid(40, 5), diag_sum_grid(40, 4)};
  Json j{{"suite", "lemmas"}, {"grids", Json::array()}};
  bool ok = true;
  for (const auto& g : grids) {
    j["grids"].push_back(grid_to_json(g));
    ok = ok && g.ok();
  }
  j["passed"] = ok;
  return j;
}

Json census_report(unsigned n, unsigned d, unsigned threads) {
  CensusOptions options;
  options.threads = threads;
  const auto census = meta_index_census(n, d, options);
  Json cells = Json::array();
  for (const auto& [cell, counts] : census.cells) {
    cells.push_back(Json{{"w", cell.w},
                         {"v", cell.v},
                         {"r", cell.r},
                         {"enumerated", counts.enumerated.str()},
                         {"formula", counts.formula.str()},
                         {"match", counts.match()},
                         {"enumerated_k_ne_l", counts.enumerated_k_ne_l.str()}});
  }
  const auto pairs = pair_overlap_census(n, d);
  Json pair_cells = Json::array();
  for (const auto& [v, count] : pairs.enumerated)
    pair_cells.push_back(Json{{"v", v}, {"enumerated", count.str()}, {"formula", pairs.formula.at(v).str()}});
  const bool ok = census.all_match() && pairs.matches;
  return Json{{"n", n},
              {"d", d},
              {"tuples_checked", census.tuples_checked},
              {"violations", census.violations},
              {"cells", cells},
              {"pair_overlap", pair_cells},
              {"passed", ok}};
}

std::string census_csv(unsigned n, unsigned d, unsigned threads, bool* all_match) {
  CensusOptions options;
  options.threads = threads;
  const auto census = meta_index_census(n, d, options);
  std::ostringstream out;
  out << "w,v,r,enumerated,formula,match,enumerated_k_ne_l\n";
  for (const auto& [cell, counts] : census.cells) {
    out << cell.w << ',' << cell.v << ',' << cell.r << ',' << counts.enumerated << ',' << counts.formula << ','
        << (counts.match() ? "true" : "false") << ',' << counts.enumerated_k_ne_l << '\n';
  }
  if (all_match) *all_match = census.all_match();
  return out.str();
}

Json varcheck_report(const MatrixModel& model, std::size_t samples, std::size_t matrices, std::uint64_t seed,
                     unsigned threads, const TensorBoundConstants& constants) {
  const SeedSpec seeds(seed);
  const std::size_t p = dimension(model.column);
  Json reports = Json::array();
  bool ok = true;
  for (std::size_t a = 0; a < matrices; ++a) {
    DenseMatrix mat = DenseMatrix::identity(p);
    std::string label = "identity";
    if (a > 0) {
      Stream stream = seeds.child(1).stream(a);
      mat = random_symmetric_unit_norm(p, stream);
      label = "random_symmetric_" + std::to_string(a);
    }
    ConcentrationOptions options;
    options.threads = threads;
    options.tensor_constants = constants;
    const auto r = var_quadform_mc(model.column, mat, samples, seeds.child(2).child(a), options);
    const bool within = r.mc_variance - 4.0 * r.mc_stderr <= r.theoretical_bound;
    ok = ok && within;
    Json j = quadform_to_json(r);
    j["matrix"] = label;
    j["within_bound"] = within;
    if (const auto* t = std::get_if<TensorModel>(&model.column)) {
      const double scale = r.spectral_norm * r.spectral_norm * static_cast<double>(p) * static_cast<double>(p) *
                           tensor_bound_rate(r.fourth_moment, t->n, t->d);
      j["tensor_rate_ratio"] = r.mc_variance / scale;
    }
    reports.push_back(j);
  }
  return Json{{"suite", "varbounds"}, {"model", model_to_json(model)}, {"reports", reports}, {"passed", ok}};
}

std::vector<std::string> verify_suites() { return {"lemmas", "census", "varbounds", "yaskov", "isotropy"}; }

Json run_verify(const std::string& suite, const VerifyOptions& options) {
  if (suite == "lemmas") return lemmas_report();
  if (suite == "census") {
    std::vector<std::pair<unsigned, unsigned>> grid = {{5, 2}, {6, 2}, {7, 2}, {8, 2}, {6, 3}};
    if (options.n || options.d) grid = {{options.n.value_or(6), options.d.value_or(2)}};
    Json j{{"suite", "census"}, {"runs", Json::array()}};
    bool ok = true;
    for (const auto& [n, d] : grid) {
      Json run = census_report(n, d, options.threads);
      ok = ok && run["passed"].get<bool>();
      j["runs"].push_back(std::move(run));
    }
    j["passed"] = ok;
    return j;
  }
  if (suite == "varbounds") {
    const MatrixModel model = figure_model(options.model, options.scale_factor);
    return varcheck_report(model, options.samples, options.matrices, options.seed, options.threads);
  }
  if (suite == "yaskov") {
    const unsigned blocks = options.n.value_or(2);
    const auto r = yaskov_counterexample(repeat_block(GaussianHermite{}, blocks), options.samples,
                                         SeedSpec(options.seed));
    const double band = 3.0 * r.binomial_stderr;
    const bool ok = std::abs(r.zero_fraction - r.expected_zero_fraction) <= std::max(band, 1.0 / static_cast<double>(options.samples));
    return Json{{"suite", "yaskov"},
                {"blocks", blocks},
                {"samples", options.samples},
                {"zero_fraction", r.zero_fraction},
                {"expected_zero_fraction", r.expected_zero_fraction},
                {"band", band},
                {"norm_mean", r.norm.mean},
                {"norm_variance", r.norm.variance},
                {"passed", ok}};
  }
  if (suite == "isotropy") {
    const std::vector<std::pair<std::string, ColumnLaw>> models = {
        {"gaussian_hermite", repeat_block(GaussianHermite{}, 4)},
        {"xor_triple", repeat_block(XorTriple{}, 3)},
        {"basis_vector", repeat_block(BasisVector{4}, 3)},
        {"tensor_5_2_rademacher", TensorModel{5, 2, EntryLaw::Rademacher}},
        {"tensor_6_3_uniform", TensorModel{6, 3, EntryLaw::UniformSqrt3}},
    };
    Json j{{"suite", "isotropy"}, {"trials", options.samples}, {"models", Json::array()}};
    bool ok = true;
    for (const auto& [name, law] : models) {
      const DenseMatrix cov = empirical_covariance_of_column(law, options.samples, SeedSpec(options.seed));
      const auto variances = entry_variances(law);
      double k = max_fourth_moment(law);
      if (const auto* t = std::get_if<TensorModel>(&law)) k = std::pow(k, static_cast<double>(t->d));
      const double tol = 4.0 * std::sqrt(k / static_cast<double>(options.samples));
      double worst = 0.0;
      for (std::size_t i = 0; i < cov.rows(); ++i)
        for (std::size_t k = 0; k < cov.cols(); ++k)
          worst = std::max(worst, std::abs(cov(i, k) - (i == k ? variances[i] : 0.0)));
      const bool pass = worst <= tol;
      ok = ok && pass;
      j["models"].push_back(Json{{"name", name}, {"max_deviation", worst}, {"tolerance", tol}, {"passed", pass}});
    }
    j["passed"] = ok;
    return j;
  }
  throw ConfigError("unknown verify suite '" + suite + "'");
}

}  // namespace mpsim

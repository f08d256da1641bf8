#include "mpsim/mplaw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mpsim/quadrature.hpp"

namespace mpsim {

using cplx = std::complex<double>;

MpLaw::MpLaw(double lambda, double sigma2) : lambda_(lambda), sigma2_(sigma2) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw MpLawError("MpLaw: lambda must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw MpLawError("MpLaw: sigma2 must be positive");
  const double root = std::sqrt(lambda);
  lower_ = sigma2 * (1.0 - root) * (1.0 - root);
  upper_ = sigma2 * (1.0 + root) * (1.0 + root);
  atom0_ = std::max(0.0, 1.0 - 1.0 / lambda);
}

double mp_density(double x, const MpLaw& law) {
  if (!(x > law.lower_edge()) || !(x < law.upper_edge()) || !(x > 0.0)) return 0.0;
  const double radicand = (law.upper_edge() - x) * (x - law.lower_edge());
  return std::sqrt(radicand) / (2.0 * std::numbers::pi * law.lambda() * law.sigma2() * x);
}

double mp_cdf(double x, const MpLaw& law) {
  double value = x >= 0.0 ? law.atom_at_zero() : 0.0;
  const double a = law.lower_edge();
  const double b = law.upper_edge();
  if (x <= a) return value;
  const double width = b - a;
  const double top = std::min(x, b);
  const double theta_max = std::asin(std::sqrt(std::clamp((top - a) / width, 0.0, 1.0)));
  const double scale = width * width / (std::numbers::pi * law.lambda() * law.sigma2());
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double xt = a + width * s * s;
    if (a == 0.0) return width * c * c / (std::numbers::pi * law.lambda() * law.sigma2());
    return scale * s * s * c * c / xt;
  };
  value += integrate_adaptive(integrand, 0.0, theta_max, 1e-13).value;
  return std::clamp(value, 0.0, 1.0);
}

SpectralMixture::SpectralMixture(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw MpLawError("SpectralMixture: no atoms");
  double total = 0.0;
  for (const auto& atom : atoms_) {
    if (!(atom.weight > 0.0)) throw MpLawError("SpectralMixture: weights must be positive");
    if (!(atom.location >= 0.0) || !std::isfinite(atom.location))
      throw MpLawError("SpectralMixture: locations must be finite and nonnegative");
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw MpLawError("SpectralMixture: weights sum to " + std::to_string(total) + ", not 1");
}

double SpectralMixture::min_location() const {
  return std::min_element(atoms_.begin(), atoms_.end(),
                          [](const Atom& a, const Atom& b) { return a.location < b.location; })
      ->location;
}

double SpectralMixture::max_location() const {
  return std::max_element(atoms_.begin(), atoms_.end(),
                          [](const Atom& a, const Atom& b) { return a.location < b.location; })
      ->location;
}

cplx stieltjes_map(cplx s, cplx z, double lambda, const SpectralMixture& h) {
  cplx g = 0.0;
  for (const auto& atom : h.atoms()) g += atom.weight / (atom.location * (1.0 - lambda - lambda * z * s) - z);
  return g;
}

namespace {

// Companion form: u = λs − (1−λ)/z turns s = G(s) into u = F(u) with
// F(u) = −1/(z − λ Σ w t/(1 + t u)), which maps the upper half-plane into itself.
struct CompanionValue {
  cplx f;
  cplx df;
};

CompanionValue companion_map(cplx u, cplx z, double lambda, const SpectralMixture& h) {
  cplx g = 0.0, dg = 0.0;
  for (const auto& atom : h.atoms()) {
    const cplx denom = 1.0 + atom.location * u;
    g += atom.weight * atom.location / denom;
    dg -= atom.weight * atom.location * atom.location / (denom * denom);
  }
  const cplx d = z - lambda * g;
  return {-1.0 / d, -lambda * dg / (d * d)};
}

cplx s_from_companion(cplx u, cplx z, const SpectralMixture& h) {
  cplx total = 0.0;
  for (const auto& atom : h.atoms()) total += atom.weight / (1.0 + atom.location * u);
  return -total / z;
}

double relative_residual(cplx s, cplx g) { return std::abs(s - g) / std::max(1.0, std::abs(s)); }

bool admissible(cplx s) { return std::isfinite(s.real()) && std::isfinite(s.imag()) && s.imag() > 0.0; }

}  // namespace

namespace {

struct CompanionSolution {
  cplx u;
  double residual;
};

CompanionSolution solve_companion(cplx z, double lambda, const SpectralMixture& h, cplx u,
                                  const StieltjesOptions& options) {
  if (!admissible(u)) u = -1.0 / z;
  CompanionValue current = companion_map(u, z, lambda, h);
  double residual = relative_residual(u, current.f);
  double alpha = options.damping;
  const double inner_tolerance = 0.01 * options.tolerance;
  for (int iter = 0; iter < options.max_iterations && residual > inner_tolerance; ++iter) {
    // Newton on u − F(u), backtracking along the step.
    const cplx fprime = 1.0 - current.df;
    bool improved = false;
    if (std::abs(fprime) > 0.0) {
      const cplx step = (u - current.f) / fprime;
      for (double fraction = 1.0; fraction > 1e-3 && !improved; fraction *= 0.5) {
        const cplx candidate = u - fraction * step;
        if (!admissible(candidate)) continue;
        const CompanionValue next = companion_map(candidate, z, lambda, h);
        const double next_residual = relative_residual(candidate, next.f);
        if (next_residual < residual) {
          u = candidate;
          current = next;
          residual = next_residual;
          improved = true;
        }
      }
    }
    if (improved) continue;

    // Damped fixed-point step, halving the damping whenever it fails to improve.
    while (alpha > 1e-12) {
      const cplx candidate = (1.0 - alpha) * u + alpha * current.f;
      if (admissible(candidate)) {
        const CompanionValue next = companion_map(candidate, z, lambda, h);
        const double next_residual = relative_residual(candidate, next.f);
        if (next_residual < residual) {
          u = candidate;
          current = next;
          residual = next_residual;
          improved = true;
          alpha = std::min(options.damping, 2.0 * alpha);
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  return {u, residual};
}

void check_arguments(cplx z, double lambda) {
  if (!(z.imag() > 0.0)) throw MpLawError("stieltjes_anisotropic: Im z must be positive");
  if (!(lambda > 0.0)) throw MpLawError("stieltjes_anisotropic: lambda must be positive");
}

[[noreturn]] void no_convergence(cplx z, double residual) {
  throw StieltjesError("stieltjes_anisotropic: no convergence at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + "), residual " + std::to_string(residual),
                       residual);
}

}  // namespace

cplx stieltjes_anisotropic_from(cplx z, double lambda, const SpectralMixture& h, cplx initial,
                                const StieltjesOptions& options) {
  check_arguments(z, lambda);
  double worst = 0.0;
  const cplx converted = admissible(initial) ? lambda * initial - (1.0 - lambda) / z : -1.0 / z;
  for (cplx start : {converted, cplx(-1.0) / z, cplx(0.0, 1.0)}) {
    const auto sol = solve_companion(z, lambda, h, start, options);
    const cplx s = s_from_companion(sol.u, z, h);
    if (sol.residual <= options.tolerance && admissible(s)) return s;
    worst = sol.residual;
  }
  no_convergence(z, worst);
}

cplx stieltjes_anisotropic(cplx z, double lambda, const SpectralMixture& h,
                           const StieltjesOptions& options) {
  check_arguments(z, lambda);
  double eta = std::max(1.0, z.imag());
  cplx zk(z.real(), eta);
  auto sol = solve_companion(zk, lambda, h, -1.0 / zk, options);
  while (eta > z.imag()) {
    eta = std::max(z.imag(), eta * 0.1);
    zk = cplx(z.real(), eta);
    sol = solve_companion(zk, lambda, h, sol.u, options);
  }
  const cplx s = s_from_companion(sol.u, z, h);
  if (sol.residual <= options.tolerance && admissible(s)) return s;
  return stieltjes_anisotropic_from(z, lambda, h, cplx(0.0, 1.0), options);
}

namespace {

// Removes the transform −a/z of the atom at zero that appears when λ > 1.
cplx continuous_part(cplx s, cplx z, double lambda) { return s + std::max(0.0, 1.0 - 1.0 / lambda) / z; }

}  // namespace

double density_from_stieltjes(double x, double lambda, const SpectralMixture& h, double eta) {
  if (!(eta > 0.0)) throw MpLawError("density_from_stieltjes: eta must be positive");
  const cplx z(x, eta);
  return continuous_part(stieltjes_anisotropic(z, lambda, h), z, lambda).imag() / std::numbers::pi;
}

Esd::Esd(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  std::sort(values_.begin(), values_.end());
}

double Esd::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

AnisotropicLaw::AnisotropicLaw(double lambda, SpectralMixture h, std::size_t grid_points, double eta)
    : lambda_(lambda), atom0_(std::max(0.0, 1.0 - 1.0 / lambda)) {
  if (grid_points < 16) throw MpLawError("AnisotropicLaw: grid too coarse");
  const double root = std::sqrt(lambda);
  const double hi = h.max_location() * (1.0 + root) * (1.0 + root) * 1.02;
  double lo = lambda < 1.0 ? h.min_location() * (1.0 - root) * (1.0 - root) * 0.98 : 0.0;
  if (lo <= 0.0) lo = hi * 1e-7;
  grid_.resize(grid_points);
  density_.resize(grid_points);
  cumulative_.assign(grid_points, 0.0);
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  cplx s{};
  for (std::size_t k = 0; k < grid_points; ++k) {
    grid_[k] = lo + step * static_cast<double>(k);
    const cplx z(grid_[k], eta);
    if (k == 0) {
      s = stieltjes_anisotropic(z, lambda, h);
    } else {
      try {
        s = stieltjes_anisotropic_from(z, lambda, h, s);
      } catch (const StieltjesError&) {
        s = stieltjes_anisotropic(z, lambda, h);
      }
    }
    density_[k] = std::max(0.0, continuous_part(s, z, lambda).imag() / std::numbers::pi);
  }
  for (std::size_t k = 1; k < grid_points; ++k)
    cumulative_[k] = cumulative_[k - 1] + 0.5 * step * (density_[k] + density_[k - 1]);
  raw_mass_ = cumulative_.back();
  const double target = 1.0 - atom0_;
  if (raw_mass_ > 0.0)
    for (double& c : cumulative_) c *= target / raw_mass_;
}

double AnisotropicLaw::density(double x) const {
  if (x <= grid_.front() || x >= grid_.back()) return 0.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
  const double t = (x - grid_[k - 1]) / (grid_[k] - grid_[k - 1]);
  return (1.0 - t) * density_[k - 1] + t * density_[k];
}

double AnisotropicLaw::cdf(double x) const {
  double value = x >= 0.0 ? atom0_ : 0.0;
  if (x <= grid_.front()) return value;
  if (x >= grid_.back()) return value + cumulative_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
  const double t = (x - grid_[k - 1]) / (grid_[k] - grid_[k - 1]);
  return value + (1.0 - t) * cumulative_[k - 1] + t * cumulative_[k];
}

namespace {

template <typename Cdf>
double ks_against(const Esd& e, Cdf&& cdf, double atom0) {
  const auto values = e.eigenvalues();
  const double p = static_cast<double>(values.size());
  if (values.empty()) throw MpLawError("ks_distance: empty spectral distribution");
  double sup = 0.0;
  auto visit = [&](double x, double esd_left, double esd_right) {
    const double right = cdf(x);
    const double left = (x == 0.0) ? right - atom0 : right;
    sup = std::max({sup, std::abs(esd_right - right), std::abs(esd_left - left)});
  };
  bool zero_visited = false;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double x = values[i];
    if (atom0 > 0.0 && !zero_visited && x > 0.0) {
      const double below = static_cast<double>(i) / p;
      visit(0.0, below, below);
      zero_visited = true;
    }
    if (x == 0.0) zero_visited = true;
    visit(x, static_cast<double>(i) / p, static_cast<double>(j) / p);
    i = j;
  }
  if (atom0 > 0.0 && !zero_visited) visit(0.0, 1.0, 1.0);
  return std::min(1.0, sup);
}

}  // namespace

double ks_distance(const Esd& e, const MpLaw& law) {
  return ks_against(e, [&](double x) { return mp_cdf(x, law); }, law.atom_at_zero());
}

double ks_distance(const Esd& e, const AnisotropicLaw& law) {
  return ks_against(e, [&](double x) { return law.cdf(x); }, law.atom_at_zero());
}

}  // namespace mpsim

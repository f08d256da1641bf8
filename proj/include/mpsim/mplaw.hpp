#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mpsim {

class MpLawError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Marchenko–Pastur law with aspect ratio λ = p/m and variance scale σ².
class MpLaw {
 public:
  explicit MpLaw(double lambda, double sigma2 = 1.0);

  double lambda() const { return lambda_; }
  double sigma2() const { return sigma2_; }
  double lower_edge() const { return lower_; }
  double upper_edge() const { return upper_; }
  /// Point mass at the origin, max(0, 1 − 1/λ).
  double atom_at_zero() const { return atom0_; }

 private:
  double lambda_;
  double sigma2_;
  double lower_;
  double upper_;
  double atom0_;
};

/// Continuous part of the law; the atom at zero is not part of the density.
double mp_density(double x, const MpLaw& law);

/// Right-continuous distribution function including the atom at zero.
/// The continuous part is integrated adaptively after the substitution
/// x = λ₋ + (λ₊ − λ₋) sin²θ, which removes the square-root edge behaviour.
double mp_cdf(double x, const MpLaw& law);

/// Finite-atomic population spectral distribution H = Σ wₖ δ_{tₖ}.
class SpectralMixture {
 public:
  struct Atom {
    double location;
    double weight;
  };

  explicit SpectralMixture(std::vector<Atom> atoms);
  static SpectralMixture point_mass(double location) { return SpectralMixture({{location, 1.0}}); }

  std::span<const Atom> atoms() const { return atoms_; }
  double min_location() const;
  double max_location() const;

 private:
  std::vector<Atom> atoms_;
};

class StieltjesError : public std::runtime_error {
 public:
  StieltjesError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

struct StieltjesOptions {
  double damping = 0.5;         // initial α in u ← (1−α)u + α·F(u)
  double tolerance = 1e-10;     // on |u − F(u)| / max(1, |u|)
  int max_iterations = 20000;   // per continuation level
};

/// Right-hand side of the anisotropic fixed-point equation,
/// G(s) = Σ wₖ / (tₖ(1 − λ − λ z s) − z).
std::complex<double> stieltjes_map(std::complex<double> s, std::complex<double> z, double lambda,
                                   const SpectralMixture& h);

/// Solves s = G(s) on the branch with Im s > 0. The iteration runs on the
/// companion transform u = λs − (1−λ)/z, which satisfies
/// u = F(u) = −1/(z − λ Σ wₖtₖ/(1 + tₖu)); s is recovered as −(1/z) Σ wₖ/(1 + tₖu).
/// Damped fixed-point steps are interleaved with Newton steps; for small Im z the
/// solution is continued down from Im z = 1. Throws StieltjesError when the
/// residual cannot be reduced to the tolerance.
std::complex<double> stieltjes_anisotropic(std::complex<double> z, double lambda,
                                           const SpectralMixture& h,
                                           const StieltjesOptions& options = {});

/// Same as stieltjes_anisotropic but starting from a caller-supplied guess at
/// the target z (no continuation), falling back to fixed starts if the guess
/// does not converge. Useful when sweeping a grid.
std::complex<double> stieltjes_anisotropic_from(std::complex<double> z, double lambda,
                                                const SpectralMixture& h,
                                                std::complex<double> initial,
                                                const StieltjesOptions& options = {});

/// (1/π) Im s(x + iη), excluding the atom at zero when λ > 1.
double density_from_stieltjes(double x, double lambda, const SpectralMixture& h,
                              double eta = 1e-6);

/// Empirical spectral distribution: mass 1/p at each eigenvalue.
class Esd {
 public:
  explicit Esd(std::vector<double> eigenvalues);

  std::span<const double> eigenvalues() const { return values_; }
  std::size_t size() const { return values_.size(); }
  /// #{λᵢ ≤ x} / p
  double cdf(double x) const;

 private:
  std::vector<double> values_;
};

/// Limiting law for a general H, tabulated from the Stieltjes inversion on a
/// fine grid and integrated to a distribution function.
class AnisotropicLaw {
 public:
  AnisotropicLaw(double lambda, SpectralMixture h, std::size_t grid_points = 4000,
                 double eta = 1e-6);

  double lambda() const { return lambda_; }
  double atom_at_zero() const { return atom0_; }
  double support_upper() const { return grid_.back(); }
  double density(double x) const;
  double cdf(double x) const;
  /// Mass of the tabulated continuous part before renormalization.
  double raw_continuous_mass() const { return raw_mass_; }

 private:
  double lambda_;
  double atom0_;
  double raw_mass_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

/// sup_x |F_esd(x) − F(x)|, evaluated at both one-sided limits of every jump.
double ks_distance(const Esd& e, const MpLaw& law);
double ks_distance(const Esd& e, const AnisotropicLaw& law);

}  // namespace mpsim

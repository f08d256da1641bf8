#pragma once

#include <functional>

namespace mpsim {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
/// Subdivides until the summed error estimate is below abs_tol or max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, int max_intervals = 2000);

}  // namespace mpsim

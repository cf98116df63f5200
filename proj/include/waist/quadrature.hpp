#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace waist {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
  bool converged = true;
};

/// Adaptive Simpson quadrature with Richardson correction.
///
/// The absolute tolerance is split between halves on refinement. Refinement
/// stops once `max_subdivisions` intervals have been split; the result is
/// then flagged as not converged but still returned.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-12, std::size_t max_subdivisions = 1u << 16);

/// Convenience wrapper returning only the value.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` nodes mapped onto [a, b].
/// Supported orders: 4, 6, 8, 10, 12, 16, 20.
GaussRule gauss_legendre(int order, double a, double b);

}  // namespace waist

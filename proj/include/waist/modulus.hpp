#pragma once

#include "waist/norm.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace waist {

enum class ModulusSource { analytic, numeric_lower_estimate };
enum class ModulusMethod { analytic, numeric };

/// Modulus of convexity delta(eps) on [0, 2], nondecreasing, delta(0) = 0.
///
/// Analytic curves wrap a closed form. Numeric curves are tabulated on a grid
/// (made monotone by a running minimum from the right) and linearly
/// interpolated in between.
class ModulusCurve {
 public:
  /// delta_E(eps) = 1 - sqrt(1 - eps^2/4).
  static ModulusCurve euclidean();
  /// Closed form for Euclidean and l_p norms; throws for regularized norms.
  static ModulusCurve analytic(const Norm& norm);
  /// Numeric estimate of delta on `grid` (values in (0, 2]).
  static ModulusCurve numeric(const Norm& norm, const std::vector<double>& grid, std::size_t budget_per_point,
                              std::uint64_t seed = 0);
  /// Arbitrary tabulated curve (grid strictly increasing in [0, 2]).
  static ModulusCurve tabulated(std::vector<double> grid, std::vector<double> values, std::string label);

  double operator()(double eps) const;

  ModulusSource source() const { return source_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  ModulusSource source_ = ModulusSource::analytic;
  std::string label_;
  std::function<double(double)> closed_form_;
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// One value of the modulus of convexity.
///
/// The numeric method minimizes 1 - ||x+y||/2 over unit pairs with
/// ||x - y|| = eps inside 2-D sections (all coordinate planes plus random
/// planes), refining the best coarse angle by golden-section search. The
/// result is attained by an explicit feasible pair, so it is an upper
/// estimate of the true infimum.
double modulus_of_convexity(const Norm& norm, double eps, ModulusMethod method, std::size_t budget = 100000,
                            std::uint64_t seed = 0);

struct ModulusWitness {
  double value;
  Point x;
  Point y;
};

/// Numeric method with the minimizing pair.
ModulusWitness numeric_modulus_witness(const Norm& norm, double eps, std::size_t budget, std::uint64_t seed = 0);

}  // namespace waist

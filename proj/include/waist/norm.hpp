#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace waist {

using Point = std::vector<double>;

enum class NormKind { euclidean, lp, regularized };

/// A norm on R^dim: Euclidean, l_p with 1 < p < inf, or a regularized
/// (mollified, then strongly convexified) version of one of those.
///
/// Descriptors are immutable and cheap to copy; the quadrature data of a
/// regularized norm is shared between copies.
///
/// String form: `euclidean:3`, `lp:4:3` (p, then dim),
/// `reg:lp:1.5:2:w=0.05:d=0.01`.
class Norm {
 public:
  static Norm euclidean(int dim);
  static Norm lp(double p, int dim);
  static Norm parse(std::string_view text);

  NormKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Exponent of the norm, or of the base norm for regularized kinds.
  double p() const { return p_; }
  /// Base norm of a regularized descriptor; the descriptor itself otherwise.
  const Norm& base() const;
  double mollifier_width() const;
  double delta_reg() const;

  std::string to_string() const;

  /// Evaluates the norm; `x.size()` must equal `dim()` (unchecked here).
  double operator()(std::span<const double> x) const;

  /// c with ||x|| >= c |x|_2 for every x (a guaranteed constant, not an estimate).
  double euclidean_lower_constant() const;
  /// c with ||x|| <= c |x|_2 for every x.
  double euclidean_upper_constant() const;

  friend Norm smooth_norm(const Norm& norm, double mollifier_width, double delta_reg);

 private:
  struct Smoothing;

  Norm(NormKind kind, int dim, double p) : kind_(kind), dim_(dim), p_(p) {}

  double base_eval(std::span<const double> x) const;

  NormKind kind_;
  int dim_;
  double p_;
  std::shared_ptr<const Smoothing> smoothing_;
};

/// ||x|| with a dimension check.
double norm_eval(const Norm& norm, std::span<const double> x);

/// Mollifies `norm` by averaging over a Euclidean ball of radius
/// `mollifier_width`, re-homogenizes through the gauge of the level set
/// {f <= 10}, then returns sqrt(||x||'^2 + delta_reg <x,x>).
/// Requires dim <= 4 and a Euclidean or l_p base.
Norm smooth_norm(const Norm& norm, double mollifier_width, double delta_reg);

/// x / ||x||. Throws on the zero vector.
Point radial_project(const Norm& norm, std::span<const double> x);

struct Sandwich {
  double lower;  ///< c1 in c1 |x|_2 <= ||x||
  double upper;  ///< c2 in ||x|| <= c2 |x|_2
};

/// Extremal Euclidean comparison constants for Euclidean and l_p norms.
Sandwich euclidean_sandwich(const Norm& norm);

/// Empirical bi-Lipschitz constant of the radial projection S(from) -> S(to),
/// maximized over `pairs` random pairs at mixed separations.
double measure_radial_bilipschitz(const Norm& from, const Norm& to, std::size_t pairs,
                                  std::uint64_t seed);

/// Eigenvalues (ascending) of the finite-difference Hessian of x -> ||x||^2 at x.
std::vector<double> squared_norm_hessian_eigenvalues(const Norm& norm, std::span<const double> x,
                                                     double step = 1e-4);

/// Plain Euclidean helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double euclidean_length(std::span<const double> x);

}  // namespace waist

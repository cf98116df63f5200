#pragma once

#include "waist/modulus.hpp"

#include <string>
#include <vector>

namespace waist {

/// Upper limit of the F integral. pi gives the larger ratio, hence the
/// smaller (safer) bound, and is the default.
enum class FUpper { pi, half_pi };
/// How the w2 tube radius eps/(n+1) is read on the round sphere.
enum class TubeRadius { geodesic, chordal };
enum class BoundKind { waist_w, projection_w2, gromov_milman, round_sphere_reference };

std::string to_string(FUpper f);
FUpper parse_f_upper(const std::string& text);
std::string to_string(BoundKind kind);

struct PsiAngles {
  double psi1;  ///< 2 asin(eps / (4 sqrt(k+1)))
  double psi2;  ///< 2 asin(eps / (2 sqrt(k+1)))
};

PsiAngles psi_angles(int k, double eps);

struct FGIntegrals {
  double F;  ///< integral of sin^{k-1} from psi2 to the upper limit
  double G;  ///< integral of sin^{k-1} from 0 to psi1
};

FGIntegrals fg_integrals(int k, double eps, FUpper f_upper = FUpper::pi);

struct BoundInputs {
  int n = 1;  ///< sphere dimension (ambient dimension n+1)
  int k = 1;  ///< target dimension, 1 <= k <= n
  double eps = 0.0;
  ModulusCurve modulus = ModulusCurve::euclidean();
  FUpper f_upper = FUpper::pi;
};

struct BoundValue {
  double value = 0.0;
  BoundKind kind = BoundKind::waist_w;
  int n = 0;
  int k = 0;
  double eps = 0.0;
  std::string modulus_label;
  FUpper f_upper = FUpper::pi;
};

/// w(eps) = 1 / (1 + (1 - 2 delta(eps/2))^{n-k} (k+1)^{k+1} F(k, eps/2) / G(k, eps/2)),
/// with 1 - 2 delta clamped at 0.
BoundValue waist_bound_w(const BoundInputs& inputs);

/// (1 - 2 delta(eps))^{n-k} (k+1)^{k+1} F(k, eps) / G(k, eps): the needle ratio bound.
double needle_ratio_bound(int n, int k, double eps, const ModulusCurve& modulus, FUpper f_upper = FUpper::pi);

/// Normalized volume of the geodesic r-neighborhood of an equatorial S^{n-k} in S^n.
double sphere_tube_volume(int n, int k, double r);

/// w2(eps) = (n+1)^{-n-1} vol(S^{n-k} + eps/(n+1)) / vol(S^n).
BoundValue projection_bound_w2(int n, int k, double eps, TubeRadius radius = TubeRadius::geodesic);

/// 1 - exp(-a n) with a = delta(max(0, eps/8 - theta_n)), theta_n = 1 - 2^{-1/(n-1)}.
BoundValue gromov_milman_bound(int n, double eps, const ModulusCurve& modulus);

/// Exponent a(eps) of the Gromov-Milman bound (0 when clamped).
double gromov_milman_exponent(int n, double eps, const ModulusCurve& modulus);

/// Round-sphere waist vol(S^{n-k} + eps)/vol(S^n), geodesic eps capped at pi/2.
BoundValue round_sphere_waist(int n, int k, double eps);

struct BoundRow {
  double eps = 0.0;
  double w = 0.0;
  double w2 = 0.0;
  double gm = 0.0;
  double b_exponent = 0.0;  ///< 2 delta(eps/2)
  double a_exponent = 0.0;  ///< delta(eps/8 - theta_n), clamped
};

std::vector<BoundRow> bound_table(int n, int k, const std::vector<double>& eps_grid, const ModulusCurve& modulus,
                                  FUpper f_upper = FUpper::pi, TubeRadius radius = TubeRadius::geodesic);

/// CSV with header `eps,w,w2,gm,b_exponent,n,k,f_upper`.
std::string bound_table_csv(const std::vector<BoundRow>& rows, int n, int k, FUpper f_upper);

/// Least-squares slope of log(w_l(r)/w_k(r)) against log r on `points`
/// log-spaced radii in [r_lo, r_hi].
double waist_ratio_loglog_slope(int n, int l, int k, const ModulusCurve& modulus, double r_lo = 1e-4,
                                double r_hi = 1e-2, int points = 21, FUpper f_upper = FUpper::pi);

}  // namespace waist

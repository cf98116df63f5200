#include "waist/bounds.hpp"

#include "waist/format.hpp"
#include "waist/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace waist {

namespace {

constexpr double kQuadTol = 1e-12;

void check_nk(int n, int k) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
}

double sin_power_integral(int k, double a, double b) {
  if (k == 1) return b - a;
  const int e = k - 1;
  return integrate([e](double x) { return std::pow(std::sin(x), e); }, a, b, kQuadTol);
}

}  // namespace

std::string to_string(FUpper f) { return f == FUpper::pi ? "pi" : "halfpi"; }

FUpper parse_f_upper(const std::string& text) {
  if (text == "pi") return FUpper::pi;
  if (text == "halfpi" || text == "half_pi") return FUpper::half_pi;
  throw std::invalid_argument("f-upper must be 'pi' or 'halfpi' (got '" + text + "')");
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::waist_w: return "waist_w";
    case BoundKind::projection_w2: return "projection_w2";
    case BoundKind::gromov_milman: return "gromov_milman";
    case BoundKind::round_sphere_reference: return "round_sphere_reference";
  }
  return {};
}

PsiAngles psi_angles(int k, double eps) {
  if (k < 1) throw std::invalid_argument("psi_angles: k must be >= 1");
  if (!(eps >= 0.0)) throw std::domain_error("psi_angles: eps must be positive");
  const double root = std::sqrt(static_cast<double>(k) + 1.0);
  const double s2 = eps / (2.0 * root);
  if (s2 > 1.0) throw std::domain_error("psi_angles: eps/(2 sqrt(k+1)) exceeds 1");
  return {2.0 * std::asin(eps / (4.0 * root)), 2.0 * std::asin(s2)};
}

FGIntegrals fg_integrals(int k, double eps, FUpper f_upper) {
  const auto psi = psi_angles(k, eps);
  const double upper = f_upper == FUpper::pi ? std::numbers::pi : std::numbers::pi / 2.0;
  return {sin_power_integral(k, psi.psi2, upper), sin_power_integral(k, 0.0, psi.psi1)};
}

double needle_ratio_bound(int n, int k, double eps, const ModulusCurve& modulus, FUpper f_upper) {
  check_nk(n, k);
  const auto fg = fg_integrals(k, eps, f_upper);
  const double base = std::max(0.0, 1.0 - 2.0 * modulus(eps));
  const double power = n == k ? 1.0 : std::pow(base, n - k);
  return power * std::pow(k + 1.0, k + 1.0) * fg.F / fg.G;
}

BoundValue waist_bound_w(const BoundInputs& in) {
  check_nk(in.n, in.k);
  if (!(in.eps >= 0.0) || in.eps > 2.0) throw std::domain_error("waist_bound_w: eps must lie in (0, 2]");
  BoundValue out{0.0, BoundKind::waist_w, in.n, in.k, in.eps, in.modulus.label(), in.f_upper};
  if (in.eps == 0.0) return out;
  const double half = in.eps / 2.0;
  const auto fg = fg_integrals(in.k, half, in.f_upper);
  const double base = std::max(0.0, 1.0 - 2.0 * in.modulus(half));
  const double power = in.n == in.k ? 1.0 : std::pow(base, in.n - in.k);
  const double ratio = power * std::pow(in.k + 1.0, in.k + 1.0) * fg.F / fg.G;
  out.value = 1.0 / (1.0 + ratio);
  return out;
}

double sphere_tube_volume(int n, int k, double r) {
  check_nk(n, k);
  if (!(r >= 0.0) || r > std::numbers::pi / 2.0 + 1e-15) {
    throw std::domain_error("sphere_tube_volume: r must lie in [0, pi/2]");
  }
  if (r == 0.0) return 0.0;
  const int a = n - k, b = k - 1;
  auto density = [a, b](double t) { return std::pow(std::cos(t), a) * std::pow(std::sin(t), b); };
  const double total = integrate(density, 0.0, std::numbers::pi / 2.0, 1e-14);
  if (r >= std::numbers::pi / 2.0) return 1.0;
  return std::min(1.0, integrate(density, 0.0, r, 1e-14) / total);
}

BoundValue projection_bound_w2(int n, int k, double eps, TubeRadius radius) {
  check_nk(n, k);
  if (!(eps >= 0.0) || eps > 2.0) throw std::domain_error("projection_bound_w2: eps must lie in (0, 2]");
  double r = eps / (n + 1.0);
  if (radius == TubeRadius::chordal) r = 2.0 * std::asin(std::min(1.0, r / 2.0));
  r = std::min(r, std::numbers::pi / 2.0);
  const double scale = std::exp(-(n + 1.0) * std::log(n + 1.0));
  return {scale * sphere_tube_volume(n, k, r), BoundKind::projection_w2, n, k, eps, "round", FUpper::pi};
}

double gromov_milman_exponent(int n, double eps, const ModulusCurve& modulus) {
  if (n < 2) throw std::invalid_argument("gromov_milman_bound: n must be >= 2");
  const double theta = 1.0 - std::pow(0.5, 1.0 / (n - 1.0));
  return modulus(std::max(0.0, eps / 8.0 - theta));
}

BoundValue gromov_milman_bound(int n, double eps, const ModulusCurve& modulus) {
  const double a = gromov_milman_exponent(n, eps, modulus);
  return {1.0 - std::exp(-a * n), BoundKind::gromov_milman, n, 1, eps, modulus.label(), FUpper::pi};
}

BoundValue round_sphere_waist(int n, int k, double eps) {
  const double r = std::min(eps, std::numbers::pi / 2.0);
  return {sphere_tube_volume(n, k, r), BoundKind::round_sphere_reference, n, k, eps, "round", FUpper::pi};
}

std::vector<BoundRow> bound_table(int n, int k, const std::vector<double>& eps_grid, const ModulusCurve& modulus,
                                  FUpper f_upper, TubeRadius radius) {
  check_nk(n, k);
  std::vector<BoundRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    BoundRow row;
    row.eps = eps;
    row.w = waist_bound_w({n, k, eps, modulus, f_upper}).value;
    row.w2 = projection_bound_w2(n, k, eps, radius).value;
    // The isoperimetric comparison needs n >= 2; a 1-sphere gets the trivial bound.
    if (n >= 2) {
      row.a_exponent = gromov_milman_exponent(n, eps, modulus);
      row.gm = gromov_milman_bound(n, eps, modulus).value;
    }
    row.b_exponent = 2.0 * modulus(eps / 2.0);
    rows.push_back(row);
  }
  return rows;
}

std::string bound_table_csv(const std::vector<BoundRow>& rows, int n, int k, FUpper f_upper) {
  std::ostringstream out;
  out << "eps,w,w2,gm,b_exponent,n,k,f_upper\n";
  for (const auto& r : rows) {
    out << format_double(r.eps) << ',' << format_double(r.w) << ',' << format_double(r.w2) << ','
        << format_double(r.gm) << ',' << format_double(r.b_exponent) << ',' << n << ',' << k << ','
        << to_string(f_upper) << '\n';
  }
  return out.str();
}

double waist_ratio_loglog_slope(int n, int l, int k, const ModulusCurve& modulus, double r_lo, double r_hi,
                                int points, FUpper f_upper) {
  if (points < 2 || !(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("slope: bad radius grid");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < points; ++i) {
    const double lr = std::log(r_lo) + (std::log(r_hi) - std::log(r_lo)) * i / (points - 1.0);
    const double r = std::exp(lr);
    const double wl = waist_bound_w({n, l, r, modulus, f_upper}).value;
    const double wk = waist_bound_w({n, k, r, modulus, f_upper}).value;
    const double ly = std::log(wl / wk);
    sx += lr; sy += ly; sxx += lr * lr; sxy += lr * ly;
  }
  return (points * sxy - sx * sy) / (points * sxx - sx * sx);
}

}  // namespace waist

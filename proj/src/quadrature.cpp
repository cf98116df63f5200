#include "waist/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace waist {

namespace {

struct Panel {
  double a, b, fa, fm, fb, whole, tol;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <int N>
GaussRule expand_rule(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  GaussRule out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      out.nodes.push_back(mid);
      out.weights.push_back(w[i] * half);
      continue;
    }
    out.nodes.push_back(mid - half * x[i]);
    out.weights.push_back(w[i] * half);
    out.nodes.push_back(mid + half * x[i]);
    out.weights.push_back(w[i] * half);
  }
  return out;
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, std::size_t max_subdivisions) {
  QuadratureResult result;
  if (a == b) return result;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  // Start from 8 panels so that narrow features are not skipped entirely.
  constexpr int kInitial = 8;
  std::vector<Panel> stack;
  stack.reserve(64);
  const double h = (b - a) / kInitial;
  double left = a;
  double fleft = f(a);
  for (int i = 0; i < kInitial; ++i) {
    const double right = (i + 1 == kInitial) ? b : a + (i + 1) * h;
    const double mid = 0.5 * (left + right);
    const double fm = f(mid);
    const double fr = f(right);
    stack.push_back({left, right, fleft, fm, fr, simpson(left, right, fleft, fm, fr), abs_tol / kInitial});
    left = right;
    fleft = fr;
  }

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double sl = simpson(p.a, m, p.fa, flm, p.fm);
    const double sr = simpson(m, p.b, p.fm, frm, p.fb);
    const double diff = sl + sr - p.whole;
    const bool budget_left = result.subdivisions < max_subdivisions;
    if (std::abs(diff) <= 15.0 * p.tol || !budget_left || (m - p.a) <= 0.0) {
      if (!budget_left && std::abs(diff) > 15.0 * p.tol) result.converged = false;
      result.value += sl + sr + diff / 15.0;
      result.error_estimate += std::abs(diff) / 15.0;
      continue;
    }
    ++result.subdivisions;
    stack.push_back({m, p.b, p.fm, frm, p.fb, sr, 0.5 * p.tol});
    stack.push_back({p.a, m, p.fa, flm, p.fm, sl, 0.5 * p.tol});
  }
  result.value *= sign;
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  return adaptive_simpson(f, a, b, abs_tol).value;
}

GaussRule gauss_legendre(int order, double a, double b) {
  switch (order) {
    case 4: return expand_rule<4>(a, b);
    case 6: return expand_rule<6>(a, b);
    case 8: return expand_rule<8>(a, b);
    case 10: return expand_rule<10>(a, b);
    case 12: return expand_rule<12>(a, b);
    case 16: return expand_rule<16>(a, b);
    case 20: return expand_rule<20>(a, b);
    default: throw std::invalid_argument("gauss_legendre: unsupported order");
  }
}

}  // namespace waist

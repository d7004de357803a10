#include "roomreg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace roomreg {
namespace {

template <int N>
LineRule legendre_on_unit_interval() {
  using Q = boost::math::quadrature::gauss<double, N>;
  LineRule rule;
  rule.degree = 2 * N - 1;
  // Boost stores the non-negative half of the symmetric rule on [-1,1].
  const auto& x = Q::abscissa();
  const auto& w = Q::weights();
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.points.push_back(0.5);
      rule.weights.push_back(0.5 * w[i]);
      continue;
    }
    rule.points.push_back(0.5 * (1.0 - x[i]));
    rule.weights.push_back(0.5 * w[i]);
    rule.points.push_back(0.5 * (1.0 + x[i]));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule_degree5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0, wa = (155.0 - s15) / 1200.0;
    const double b = (6.0 + s15) / 21.0, wb = (155.0 + s15) / 1200.0;
    r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                {a, a, 1.0 - 2.0 * a}, {a, 1.0 - 2.0 * a, a}, {1.0 - 2.0 * a, a, a},
                {b, b, 1.0 - 2.0 * b}, {b, 1.0 - 2.0 * b, b}, {1.0 - 2.0 * b, b, b}};
    r.weights = {9.0 / 40.0, wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

LineRule gauss_legendre(int points) {
  switch (points) {
    case 1: return legendre_on_unit_interval<1>();
    case 2: return legendre_on_unit_interval<2>();
    case 3: return legendre_on_unit_interval<3>();
    case 4: return legendre_on_unit_interval<4>();
    case 5: return legendre_on_unit_interval<5>();
    case 6: return legendre_on_unit_interval<6>();
    case 7: return legendre_on_unit_interval<7>();
    case 8: return legendre_on_unit_interval<8>();
    case 9: return legendre_on_unit_interval<9>();
    case 10: return legendre_on_unit_interval<10>();
    default: throw std::invalid_argument("gauss_legendre supports 1..10 points");
  }
}

TriangleRule triangle_rule_collapsed(int degree) {
  // int_T f = int_0^1 int_0^1 f(u, v(1-u)) (1-u) dv du; the u-integrand has
  // degree+1, so k points with 2k-1 >= degree+1 suffice.
  const int k = std::max(1, (degree + 3) / 2);
  const LineRule g = gauss_legendre(k);
  TriangleRule rule;
  rule.degree = degree;
  for (size_t i = 0; i < g.points.size(); ++i) {
    for (size_t j = 0; j < g.points.size(); ++j) {
      const double u = g.points[i];
      const double v = g.points[j] * (1.0 - u);
      // Reference triangle has area 1/2; normalize weights to sum to one.
      rule.points.push_back({1.0 - u - v, u, v});
      rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace roomreg

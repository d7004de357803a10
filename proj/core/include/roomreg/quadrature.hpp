#pragma once

#include <array>
#include <vector>

namespace roomreg {

/// Rule on a triangle in barycentric coordinates; weights sum to one, so an
/// integral is area * sum(w_i f(x_i)).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0,1]; weights sum to one.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// 7-point rule exact for polynomials of degree 5. Used for all element
/// assembly: it integrates the P2 trilinear convection forms exactly.
const TriangleRule& triangle_rule_degree5();

/// Collapsed (Duffy) tensor Gauss rule, exact to the requested degree.
/// Used by tests and error norms where more accuracy is wanted.
TriangleRule triangle_rule_collapsed(int degree);

/// Gauss-Legendre rule on [0,1] with the given number of points (1..10).
LineRule gauss_legendre(int points);

}  // namespace roomreg

#ifndef OBFLOW_QUADRATURE_HPP
#define OBFLOW_QUADRATURE_HPP

#include <array>
#include <vector>

namespace obflow {

/// Symmetric positive-weight rule on the reference triangle.
/// Points are barycentric, weights sum to one; an integral over a physical
/// element K is  |K| * sum_q w_q f(x_q).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Rule exact for polynomials up to `degree` (1..6 supported).
/// Throws std::invalid_argument for unsupported degrees.
const TriangleRule& triangle_rule(int degree);

/// Two-point Gauss rule on [0,1]: exact to degree 3, used on facets.
struct FacetRule {
  std::array<double, 2> points;
  std::array<double, 2> weights;  // sum to one
};
const FacetRule& facet_rule();

}  // namespace obflow

#endif

#include "obflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace obflow {

namespace {

TriangleRule make_rule(int degree) {
  TriangleRule r;
  auto add = [&](double w, double a, double b, double c) {
    r.points.push_back({a, b, c});
    r.weights.push_back(w);
  };
  // 3-fold symmetric orbit (a, a, 1-2a)
  auto add3 = [&](double w, double a) {
    double c = 1.0 - 2.0 * a;
    add(w, a, a, c);
    add(w, a, c, a);
    add(w, c, a, a);
  };
  // 6-fold orbit of (a, b, c)
  auto add6 = [&](double w, double a, double b) {
    double c = 1.0 - a - b;
    add(w, a, b, c);
    add(w, a, c, b);
    add(w, b, a, c);
    add(w, b, c, a);
    add(w, c, a, b);
    add(w, c, b, a);
  };
  switch (degree) {
    case 0:
    case 1:
      add(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
      break;
    case 2:
      add3(1.0 / 3.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      // Dunavant degree 4, 6 points, all weights positive
      add3(0.223381589678011, 0.445948490915965);
      add3(0.109951743655322, 0.091576213509771);
      break;
    case 5: {
      const double s = std::sqrt(15.0);
      add(9.0 / 40.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
      add3((155.0 - s) / 1200.0, (6.0 - s) / 21.0);
      add3((155.0 + s) / 1200.0, (6.0 + s) / 21.0);
      break;
    }
    case 6:
      // Dunavant degree 6, 12 points, all weights positive
      add3(0.116786275726379, 0.249286745170910);
      add3(0.050844906370207, 0.063089014491502);
      add6(0.082851075618374, 0.310352451033785, 0.053145049844816);
      break;
    default:
      throw std::invalid_argument("triangle_rule: supported degrees are 1..6");
  }
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  if (degree < 0 || degree > 6)
    throw std::invalid_argument("triangle_rule: supported degrees are 1..6");
  static const TriangleRule rules[7] = {make_rule(0), make_rule(1), make_rule(2), make_rule(3),
                                        make_rule(4), make_rule(5), make_rule(6)};
  return rules[degree];
}

const FacetRule& facet_rule() {
  static const FacetRule r = {
      {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)},
      {0.5, 0.5}};
  return r;
}

}  // namespace obflow

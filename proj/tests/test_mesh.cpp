#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "obflow/mesh.hpp"

using namespace obflow;

TEST_CASE("structured mesh counts") {
  const SimplicialMesh m1 = build_structured_mesh(1, 1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_elements() == 2);
  CHECK(m1.internal_facets.size() == 1);
  CHECK(m1.boundary_facets.size() == 4);

  const SimplicialMesh m2 = build_structured_mesh(2, 2);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_elements() == 8);

  CHECK_THROWS_AS(build_structured_mesh(0, 2), std::invalid_argument);
}

TEST_CASE("structured meshes are non-obtuse right-triangle meshes") {
  const SimplicialMesh m = build_structured_mesh(8, 8);
  const MeshAudit a = audit_mesh(m);
  CHECK(a.non_obtuse);
  CHECK(a.max_angle == doctest::Approx(std::acos(-1.0) / 2.0).epsilon(1e-14));
  CHECK(a.quasi_uniformity == doctest::Approx(1.0));
  CHECK(a.obtuse_violations.empty());
  CHECK(a.all_elements_have_interior_vertex);
  // every element has positive area; facet normals are unit and perpendicular
  for (int k = 0; k < m.num_elements(); ++k) CHECK(m.element_area(k) > 0.0);
  for (const InternalFacet& f : m.internal_facets) {
    CHECK(std::abs(std::hypot(f.normal[0], f.normal[1]) - 1.0) <= 1e-14);
    const Point a0 = m.vertices[f.v0], b0 = m.vertices[f.v1];
    const double tx = b0[0] - a0[0], ty = b0[1] - a0[1];
    CHECK(std::abs(f.normal[0] * tx + f.normal[1] * ty) <= 1e-14 * std::hypot(tx, ty));
    CHECK(f.left < f.right);
  }
}

TEST_CASE("the 1x1 structured mesh is flagged for the Taylor-Hood hypothesis") {
  const MeshAudit a = audit_mesh(build_structured_mesh(1, 1));
  CHECK_FALSE(a.all_elements_have_interior_vertex);
  CHECK(a.elements_without_interior_vertex.size() == 2);
}

TEST_CASE("audit flags obtuse triangles") {
  SimplicialMesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {-0.5, 0.1}};
  m.elements = {{0, 1, 2}};
  build_topology(m);
  const MeshAudit a = audit_mesh(m);
  CHECK_FALSE(a.non_obtuse);
  CHECK(a.obtuse_violations.size() == 1);
  CHECK(a.obtuse_violations[0].first == 0);
  // law-of-cosines oracle for the angle at (0,0)
  const double ang = std::acos((1.0 * -0.5 + 0.0 * 0.1) /
                               (1.0 * std::hypot(0.5, 0.1)));
  CHECK(a.max_angle == doctest::Approx(ang).epsilon(1e-12));
}

TEST_CASE("equilateral triangle audit") {
  SimplicialMesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  m.elements = {{0, 1, 2}};
  build_topology(m);
  const MeshAudit a = audit_mesh(m);
  CHECK(a.non_obtuse);
  CHECK(a.max_angle == doctest::Approx(std::acos(-1.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("reference maps") {
  SimplicialMesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}, {0.0, 3.0}};
  m.elements = {{0, 1, 2}, {0, 3, 4}};
  build_topology(m);

  const AffineMap id = reference_map(m, 0);
  CHECK(id.b[0] == 1.0);
  CHECK(id.b[1] == 0.0);
  CHECK(id.b[2] == 0.0);
  CHECK(id.b[3] == 1.0);
  CHECK(id.det == 1.0);

  const AffineMap sc = reference_map(m, 1);
  CHECK(sc.b[0] == 2.0);
  CHECK(sc.b[3] == 3.0);
  CHECK(sc.det == 6.0);
  CHECK(std::abs(sc.det) ==
        doctest::Approx(2.0 * m.element_area(1)).epsilon(1e-12));

  // map sends reference vertices to element vertices exactly
  const Vec2 v1 = sc.apply({1.0, 0.0});
  CHECK(v1[0] == 2.0);
  CHECK(v1[1] == 0.0);

  SimplicialMesh bad;
  bad.vertices = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  bad.elements = {{0, 1, 2}};
  CHECK_THROWS_AS(build_topology(bad), std::invalid_argument);
}

TEST_CASE("gradient transform rule against finite differences") {
  const SimplicialMesh m = build_structured_mesh(3, 2, Rect{0.0, 0.0, 2.0, 1.5});
  // random affine eta(x) = a + b.x restricted to each element
  const double a = 0.37, bx = -1.21, by = 0.73;
  auto eta = [&](Point p) { return a + bx * p[0] + by * p[1]; };
  for (int k = 0; k < m.num_elements(); ++k) {
    const std::array<Vec2, 3> gh = hat_gradients(m, k);
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const double v = eta(m.vertex_of(k, i));
      grad[0] += v * gh[i][0];
      grad[1] += v * gh[i][1];
    }
    // finite-difference oracle at the element centroid
    const double h = 1e-6;
    const Point c = m.from_barycentric(k, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    const double ddx = (eta({c[0] + h, c[1]}) - eta({c[0] - h, c[1]})) / (2.0 * h);
    const double ddy = (eta({c[0], c[1] + h}) - eta({c[0], c[1] - h})) / (2.0 * h);
    CHECK(grad[0] == doctest::Approx(ddx).epsilon(1e-8));
    CHECK(grad[1] == doctest::Approx(ddy).epsilon(1e-8));
  }
}

TEST_CASE("partition of unity and non-obtuse stiffness signs") {
  const SimplicialMesh m = build_structured_mesh(5, 4);
  for (int k = 0; k < m.num_elements(); ++k) {
    const std::array<Vec2, 3> gh = hat_gradients(m, k);
    CHECK(std::abs(gh[0][0] + gh[1][0] + gh[2][0]) <= 1e-14);
    CHECK(std::abs(gh[0][1] + gh[1][1] + gh[2][1]) <= 1e-14);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        CHECK(gh[i][0] * gh[j][0] + gh[i][1] * gh[j][1] <= 1e-14);
  }
}

TEST_CASE("mesh text format round trip") {
  const SimplicialMesh m = build_structured_mesh(3, 3, Rect{-1.0, 0.5, 2.0, 3.5});
  std::stringstream ss;
  write_mesh(ss, m);
  const SimplicialMesh r = read_mesh(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  REQUIRE(r.num_elements() == m.num_elements());
  CHECK(r.internal_facets.size() == m.internal_facets.size());
  for (int v = 0; v < m.num_vertices(); ++v) {
    CHECK(r.vertices[v][0] == m.vertices[v][0]);  // 17 digits: bit-exact
    CHECK(r.vertices[v][1] == m.vertices[v][1]);
  }
}

TEST_CASE("mesh reader reports offending lines") {
  {
    std::stringstream ss("2 3 1 0\n0 0\n1 0\nnot-a-number 1\n0 1 2\n");
    CHECK_THROWS_WITH_AS(read_mesh(ss), doctest::Contains("line 4"), std::runtime_error);
  }
  {
    // negatively oriented element
    std::stringstream ss("2 3 1 0\n0 0\n0 1\n1 0\n0 1 2\n");
    CHECK_THROWS_AS(read_mesh(ss), std::invalid_argument);
  }
  {
    // facet normal not unit
    std::stringstream ss("2 4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 2 0 1 1 1\n");
    CHECK_THROWS_WITH_AS(read_mesh(ss), doctest::Contains("unit"), std::runtime_error);
  }
}

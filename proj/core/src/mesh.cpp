#include "obflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace obflow {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

}  // namespace

double SimplicialMesh::element_area(int k) const {
  return signed_area(vertex_of(k, 0), vertex_of(k, 1), vertex_of(k, 2));
}

std::array<double, 3> SimplicialMesh::barycentric(int k, const Point& x) const {
  const Point a = vertex_of(k, 0), b = vertex_of(k, 1), c = vertex_of(k, 2);
  const double area = signed_area(a, b, c);
  const double l1 = signed_area(a, x, c) / area;
  const double l2 = signed_area(a, b, x) / area;
  return {1.0 - l1 - l2, l1, l2};
}

Point SimplicialMesh::from_barycentric(int k, const std::array<double, 3>& bc) const {
  Point p{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    p[0] += bc[i] * vertex_of(k, i)[0];
    p[1] += bc[i] * vertex_of(k, i)[1];
  }
  return p;
}

void build_topology(SimplicialMesh& mesh) {
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_elements();
  for (int k = 0; k < ne; ++k) {
    for (int i = 0; i < 3; ++i) {
      int v = mesh.elements[k][i];
      if (v < 0 || v >= nv) throw std::invalid_argument("mesh: vertex index out of range");
    }
    if (!(mesh.element_area(k) > 0.0))
      throw std::invalid_argument("mesh: element " + std::to_string(k) +
                                  " is degenerate or negatively oriented");
  }

  mesh.internal_facets.clear();
  mesh.boundary_facets.clear();
  mesh.edges.clear();
  mesh.element_edges.assign(ne, {-1, -1, -1});
  mesh.boundary_vertex.assign(nv, 0);

  struct EdgeUse {
    int element;
    int local;  // local index of the opposite vertex
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> uses;
  for (int k = 0; k < ne; ++k) {
    for (int i = 0; i < 3; ++i) {
      int a = mesh.elements[k][(i + 1) % 3];
      int b = mesh.elements[k][(i + 2) % 3];
      uses[{std::min(a, b), std::max(a, b)}].push_back({k, i});
    }
  }

  mesh.boundary_edge.clear();
  for (const auto& [key, us] : uses) {
    const int eidx = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back({key.first, key.second});
    for (const EdgeUse& u : us) mesh.element_edges[u.element][u.local] = eidx;

    const Point pa = mesh.vertices[key.first];
    const Point pb = mesh.vertices[key.second];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);

    if (us.size() == 2) {
      mesh.boundary_edge.push_back(0);
      int lo = std::min(us[0].element, us[1].element);
      int hi = std::max(us[0].element, us[1].element);
      // outward normal of the lower element on this edge
      int local = (us[0].element == lo) ? us[0].local : us[1].local;
      const Point opp = mesh.vertex_of(lo, local);
      Vec2 t{pb[0] - pa[0], pb[1] - pa[1]};
      Vec2 n{t[1] / len, -t[0] / len};
      // orient away from the opposite vertex
      const Vec2 to_opp{opp[0] - pa[0], opp[1] - pa[1]};
      if (n[0] * to_opp[0] + n[1] * to_opp[1] > 0.0) {
        n[0] = -n[0];
        n[1] = -n[1];
      }
      mesh.internal_facets.push_back({key.first, key.second, lo, hi, n, len});
    } else if (us.size() == 1) {
      mesh.boundary_edge.push_back(1);
      mesh.boundary_vertex[key.first] = 1;
      mesh.boundary_vertex[key.second] = 1;
      const Point opp = mesh.vertex_of(us[0].element, us[0].local);
      Vec2 t{pb[0] - pa[0], pb[1] - pa[1]};
      Vec2 n{t[1] / len, -t[0] / len};
      const Vec2 to_opp{opp[0] - pa[0], opp[1] - pa[1]};
      if (n[0] * to_opp[0] + n[1] * to_opp[1] > 0.0) {
        n[0] = -n[0];
        n[1] = -n[1];
      }
      mesh.boundary_facets.push_back({key.first, key.second, us[0].element, n, len});
    } else {
      throw std::invalid_argument("mesh: edge shared by more than two elements");
    }
  }
}

SimplicialMesh build_structured_mesh(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_structured_mesh: nx, ny must be >= 1");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
    throw std::invalid_argument("build_structured_mesh: empty domain");
  SimplicialMesh mesh;
  const double hx = (domain.x1 - domain.x0) / nx;
  const double hy = (domain.y1 - domain.y0) / ny;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back({domain.x0 + i * hx, domain.y0 + j * hy});
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if ((i + j) % 2 == 0) {  // diagonal a-c
        mesh.elements.push_back({a, b, c});
        mesh.elements.push_back({a, c, d});
      } else {  // diagonal b-d
        mesh.elements.push_back({a, b, d});
        mesh.elements.push_back({b, c, d});
      }
    }
  }
  build_topology(mesh);
  return mesh;
}

MeshAudit audit_mesh(const SimplicialMesh& mesh) {
  MeshAudit audit;
  double hmin = 0.0, hmax = 0.0;
  const double right_angle_tol = 1e-12;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Point p0 = mesh.vertex_of(k, 0), p1 = mesh.vertex_of(k, 1), p2 = mesh.vertex_of(k, 2);
    const double e0 = std::hypot(p2[0] - p1[0], p2[1] - p1[1]);
    const double e1 = std::hypot(p2[0] - p0[0], p2[1] - p0[1]);
    const double e2 = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
    const double hk = std::max({e0, e1, e2});
    const double area = mesh.element_area(k);
    const double rho = 4.0 * area / (e0 + e1 + e2);  // diameter of inscribed ball
    audit.max_shape_ratio = std::max(audit.max_shape_ratio, hk / rho);
    hmax = std::max(hmax, hk);
    hmin = (k == 0) ? hk : std::min(hmin, hk);

    const Point pts[3] = {p0, p1, p2};
    bool interior = false;
    for (int i = 0; i < 3; ++i) {
      const Point& a = pts[i];
      const Point& b = pts[(i + 1) % 3];
      const Point& c = pts[(i + 2) % 3];
      const Vec2 u{b[0] - a[0], b[1] - a[1]}, v{c[0] - a[0], c[1] - a[1]};
      double cosang = (u[0] * v[0] + u[1] * v[1]) /
                      (std::hypot(u[0], u[1]) * std::hypot(v[0], v[1]));
      cosang = std::clamp(cosang, -1.0, 1.0);
      const double ang = std::acos(cosang);
      audit.max_angle = std::max(audit.max_angle, ang);
      if (ang > std::acos(-1.0) / 2.0 + right_angle_tol) {
        audit.non_obtuse = false;
        audit.obtuse_violations.push_back({k, ang});
      }
      if (!mesh.boundary_vertex[mesh.elements[k][i]]) interior = true;
    }
    if (!interior) {
      audit.all_elements_have_interior_vertex = false;
      audit.elements_without_interior_vertex.push_back(k);
    }
  }
  audit.h = hmax;
  audit.quasi_uniformity = (hmax > 0.0) ? hmin / hmax : 0.0;
  return audit;
}

Vec2 AffineMap::apply(const Vec2& xhat) const {
  return {origin[0] + b[0] * xhat[0] + b[1] * xhat[1],
          origin[1] + b[2] * xhat[0] + b[3] * xhat[1]};
}

Vec2 AffineMap::push_gradient(const Vec2& ghat) const {
  // B^{-T} ghat
  return {binv[0] * ghat[0] + binv[2] * ghat[1], binv[1] * ghat[0] + binv[3] * ghat[1]};
}

AffineMap reference_map(const SimplicialMesh& mesh, int k) {
  const Point p0 = mesh.vertex_of(k, 0), p1 = mesh.vertex_of(k, 1), p2 = mesh.vertex_of(k, 2);
  AffineMap map;
  map.origin = p0;
  map.b = {p1[0] - p0[0], p2[0] - p0[0], p1[1] - p0[1], p2[1] - p0[1]};
  map.det = map.b[0] * map.b[3] - map.b[1] * map.b[2];
  const double scale = std::max({std::abs(map.b[0]), std::abs(map.b[1]), std::abs(map.b[2]),
                                 std::abs(map.b[3])});
  if (std::abs(map.det) <= 1e-14 * scale * scale)
    throw std::invalid_argument("reference_map: element " + std::to_string(k) +
                                " has a singular map");
  map.binv = {map.b[3] / map.det, -map.b[1] / map.det, -map.b[2] / map.det, map.b[0] / map.det};
  return map;
}

std::array<Vec2, 3> hat_gradients(const SimplicialMesh& mesh, int k) {
  const AffineMap map = reference_map(mesh, k);
  // reference gradients: eta0 = (-1,-1), eta1 = (1,0), eta2 = (0,1)
  return {map.push_gradient({-1.0, -1.0}), map.push_gradient({1.0, 0.0}),
          map.push_gradient({0.0, 1.0})};
}

}  // namespace obflow

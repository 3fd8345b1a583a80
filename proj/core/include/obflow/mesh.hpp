#ifndef OBFLOW_MESH_HPP
#define OBFLOW_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace obflow {

using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

/// Internal facet shared by exactly two elements. `left` is the element of
/// lower index and the unit normal points from `left` into `right`; the sign
/// convention is irrelevant to the schemes (they only use |u.n|) but makes
/// output reproducible.
struct InternalFacet {
  int v0 = 0, v1 = 0;
  int left = 0, right = 0;
  Vec2 normal{};
  double length = 0.0;
};

struct BoundaryFacet {
  int v0 = 0, v1 = 0;
  int element = 0;
  Vec2 normal{};  // outward
  double length = 0.0;
};

/// Conforming 2D triangulation with facet adjacency. Immutable once built;
/// safe to share across threads.
struct SimplicialMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> elements;  // positively oriented
  std::vector<InternalFacet> internal_facets;
  std::vector<BoundaryFacet> boundary_facets;
  std::vector<char> boundary_vertex;

  // Edge enumeration shared by P2-type spaces. element_edges[k][i] is the
  // global edge opposite local vertex i.
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> element_edges;
  std::vector<char> boundary_edge;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double element_area(int k) const;
  Point vertex_of(int k, int local) const { return vertices[elements[k][local]]; }
  /// Barycentric coordinates of point x in element k.
  std::array<double, 3> barycentric(int k, const Point& x) const;
  Point from_barycentric(int k, const std::array<double, 3>& b) const;
};

/// Rebuild facets/edges/boundary flags from vertices+elements.
/// Throws std::invalid_argument on a non-conforming or badly oriented mesh.
void build_topology(SimplicialMesh& mesh);

/// Criss-cross subdivision of an nx-by-ny grid on `domain`: each cell is
/// split along one diagonal, the diagonal direction alternating with
/// (i+j) parity so the pattern is symmetric. All triangles are right
/// triangles, hence the mesh is non-obtuse.
SimplicialMesh build_structured_mesh(int nx, int ny, const Rect& domain = {});

struct MeshAudit {
  double max_shape_ratio = 0.0;   // max_k h_k / rho_k
  double quasi_uniformity = 0.0;  // min_k h_k / h
  double h = 0.0;                 // max element diameter
  bool non_obtuse = true;
  double max_angle = 0.0;  // radians
  std::vector<std::pair<int, double>> obtuse_violations;
  // Taylor-Hood needs every simplex to own at least one interior vertex;
  // flagged, not fatal.
  bool all_elements_have_interior_vertex = true;
  std::vector<int> elements_without_interior_vertex;
};

MeshAudit audit_mesh(const SimplicialMesh& mesh);

/// Affine reference map x = origin + B * xhat, with |det| = 2 |K|.
struct AffineMap {
  Point origin{};
  std::array<double, 4> b{};     // row-major 2x2
  std::array<double, 4> binv{};  // B^{-1}
  double det = 0.0;
  Vec2 apply(const Vec2& xhat) const;
  /// B^{-T} ghat: pushes a reference gradient forward (gradient rule).
  Vec2 push_gradient(const Vec2& ghat) const;
};

/// Throws std::invalid_argument (singular map) on degenerate elements.
AffineMap reference_map(const SimplicialMesh& mesh, int k);

/// Gradients of the three barycentric hat functions on element k
/// (constant on the element). Their sum vanishes.
std::array<Vec2, 3> hat_gradients(const SimplicialMesh& mesh, int k);

// Plain-text mesh format:
//   line 1:            d nv ne nf       (d = 2)
//   nv lines:          x y
//   ne lines:          v0 v1 v2         (0-based, positively oriented)
//   nf lines:          v0 v1 left right nx ny   (right = -1 on the boundary)
// '#' starts a comment. Numbers are written with 17 significant digits.
void write_mesh(std::ostream& os, const SimplicialMesh& mesh);
SimplicialMesh read_mesh(std::istream& is);
SimplicialMesh read_mesh_file(const std::string& path);
void write_mesh_file(const std::string& path, const SimplicialMesh& mesh);

}  // namespace obflow

#endif

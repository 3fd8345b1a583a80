#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "obflow/mesh.hpp"

namespace obflow {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("mesh file, line " + std::to_string(line) + ": " + what);
}

// next non-comment, non-blank line
bool next_line(std::istream& is, std::string& out, int& lineno) {
  std::string s;
  while (std::getline(is, s)) {
    ++lineno;
    auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    bool blank = true;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) {
      out = s;
      return true;
    }
  }
  return false;
}

}  // namespace

void write_mesh(std::ostream& os, const SimplicialMesh& mesh) {
  const std::size_t nf = mesh.internal_facets.size() + mesh.boundary_facets.size();
  os << "2 " << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << nf << '\n';
  for (const Point& p : mesh.vertices) os << fmt(p[0]) << ' ' << fmt(p[1]) << '\n';
  for (const auto& e : mesh.elements) os << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
  for (const auto& f : mesh.internal_facets)
    os << f.v0 << ' ' << f.v1 << ' ' << f.left << ' ' << f.right << ' ' << fmt(f.normal[0])
       << ' ' << fmt(f.normal[1]) << '\n';
  for (const auto& f : mesh.boundary_facets)
    os << f.v0 << ' ' << f.v1 << ' ' << f.element << " -1 " << fmt(f.normal[0]) << ' '
       << fmt(f.normal[1]) << '\n';
}

SimplicialMesh read_mesh(std::istream& is) {
  int lineno = 0;
  std::string line;
  if (!next_line(is, line, lineno)) fail(lineno, "missing header");
  int d = 0, nv = 0, ne = 0, nf = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> d >> nv >> ne >> nf)) fail(lineno, "header must be 'd nv ne nf'");
    if (d != 2) fail(lineno, "only d = 2 meshes are supported");
    if (nv < 3 || ne < 1) fail(lineno, "empty mesh");
  }
  SimplicialMesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!next_line(is, line, lineno)) fail(lineno, "unexpected end of vertex list");
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) fail(lineno, "vertex line must be 'x y'");
    mesh.vertices.push_back({x, y});
  }
  for (int k = 0; k < ne; ++k) {
    if (!next_line(is, line, lineno)) fail(lineno, "unexpected end of element list");
    std::istringstream ss(line);
    int a, b, c;
    if (!(ss >> a >> b >> c)) fail(lineno, "element line must be 'v0 v1 v2'");
    mesh.elements.push_back({a, b, c});
  }
  build_topology(mesh);

  // facet lines are validated against the recomputed topology, never repaired
  std::size_t seen_internal = 0, seen_boundary = 0;
  for (int f = 0; f < nf; ++f) {
    if (!next_line(is, line, lineno)) fail(lineno, "unexpected end of facet list");
    std::istringstream ss(line);
    int v0, v1, left, right;
    double nx, ny;
    if (!(ss >> v0 >> v1 >> left >> right >> nx >> ny))
      fail(lineno, "facet line must be 'v0 v1 left right nx ny'");
    if (std::abs(std::hypot(nx, ny) - 1.0) > 1e-13)
      fail(lineno, "facet normal is not unit length");
    const Point pa = mesh.vertices[v0], pb = mesh.vertices[v1];
    const double tx = pb[0] - pa[0], ty = pb[1] - pa[1];
    if (std::abs(nx * tx + ny * ty) > 1e-13 * std::hypot(tx, ty))
      fail(lineno, "facet normal is not perpendicular to the facet");
    bool found = false;
    if (right >= 0) {
      for (const auto& g : mesh.internal_facets)
        if (g.v0 == std::min(v0, v1) && g.v1 == std::max(v0, v1) && g.left == std::min(left, right) &&
            g.right == std::max(left, right))
          found = true;
      ++seen_internal;
    } else {
      for (const auto& g : mesh.boundary_facets)
        if (g.v0 == std::min(v0, v1) && g.v1 == std::max(v0, v1) && g.element == left) found = true;
      ++seen_boundary;
    }
    if (!found) fail(lineno, "facet does not match the element topology");
  }
  if (nf != 0 && (seen_internal != mesh.internal_facets.size() ||
                  seen_boundary != mesh.boundary_facets.size()))
    throw std::runtime_error("mesh file: facet count does not match element topology");
  return mesh;
}

SimplicialMesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(is);
}

void write_mesh_file(const std::string& path, const SimplicialMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write mesh file: " + path);
  write_mesh(os, mesh);
}

}  // namespace obflow

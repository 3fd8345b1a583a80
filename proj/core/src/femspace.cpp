#include "obflow/femspace.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "obflow/quadrature.hpp"

namespace obflow {

const char* space_name(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::VEL_P2: return "p2";
    case SpaceTag::VEL_P2_REDUCED: return "p2-reduced";
    case SpaceTag::VEL_MINI: return "mini";
    case SpaceTag::PRES_P0: return "p0";
    case SpaceTag::PRES_P1: return "p1";
    case SpaceTag::STRESS_P0: return "stress-p0";
    case SpaceTag::STRESS_P1: return "stress-p1";
  }
  return "?";
}

bool lbb_whitelisted(SpaceTag velocity, SpaceTag pressure) {
  if (pressure == SpaceTag::PRES_P0)
    return velocity == SpaceTag::VEL_P2 || velocity == SpaceTag::VEL_P2_REDUCED;
  if (pressure == SpaceTag::PRES_P1)
    return velocity == SpaceTag::VEL_P2 || velocity == SpaceTag::VEL_MINI;
  return false;
}

VelocitySpace::VelocitySpace(const SimplicialMesh& mesh, SpaceTag tag)
    : mesh_(&mesh), tag_(tag) {
  const int nv = mesh.num_vertices();
  const int nedge = mesh.num_edges();
  const int nk = mesh.num_elements();
  switch (tag) {
    case SpaceTag::VEL_P2:
      ndof_ = 2 * (nv + nedge);
      local_count_ = 12;
      break;
    case SpaceTag::VEL_P2_REDUCED:
      ndof_ = 2 * nv + nedge;
      local_count_ = 9;
      break;
    case SpaceTag::VEL_MINI:
      ndof_ = 2 * (nv + nk);
      local_count_ = 8;
      break;
    default:
      throw std::invalid_argument("VelocitySpace: not a velocity tag");
  }
  pinned_.assign(ndof_, 0);
  for (int v = 0; v < nv; ++v)
    if (mesh.boundary_vertex[v]) pinned_[2 * v] = pinned_[2 * v + 1] = 1;
  if (tag == SpaceTag::VEL_P2) {
    for (int e = 0; e < nedge; ++e)
      if (mesh.boundary_edge[e]) pinned_[2 * nv + 2 * e] = pinned_[2 * nv + 2 * e + 1] = 1;
  } else if (tag == SpaceTag::VEL_P2_REDUCED) {
    for (int e = 0; e < nedge; ++e)
      if (mesh.boundary_edge[e]) pinned_[2 * nv + e] = 1;
  }
  // global edge normals for the reduced space's bubbles (and handy for tests)
  edge_normals_.assign(nedge, {0.0, 0.0});
  for (const auto& f : mesh.internal_facets) {
    // locate the edge index via any adjacent element
    for (int i = 0; i < 3; ++i) {
      int e = mesh.element_edges[f.left][i];
      const auto& ev = mesh.edges[e];
      if (ev[0] == f.v0 && ev[1] == f.v1) edge_normals_[e] = f.normal;
    }
  }
  for (const auto& f : mesh.boundary_facets) {
    for (int i = 0; i < 3; ++i) {
      int e = mesh.element_edges[f.element][i];
      const auto& ev = mesh.edges[e];
      if (ev[0] == std::min(f.v0, f.v1) && ev[1] == std::max(f.v0, f.v1))
        edge_normals_[e] = f.normal;
    }
  }
}

int VelocitySpace::global_dof(int element, int local) const {
  const auto& el = mesh_->elements[element];
  const int nv = mesh_->num_vertices();
  switch (tag_) {
    case SpaceTag::VEL_P2:
      if (local < 6) return 2 * el[local / 2] + local % 2;
      return 2 * nv + 2 * mesh_->element_edges[element][(local - 6) / 2] + local % 2;
    case SpaceTag::VEL_P2_REDUCED:
      if (local < 6) return 2 * el[local / 2] + local % 2;
      return 2 * nv + mesh_->element_edges[element][local - 6];
    case SpaceTag::VEL_MINI:
      if (local < 6) return 2 * el[local / 2] + local % 2;
      return 2 * nv + 2 * element + (local - 6);
    default:
      return -1;
  }
}

void VelocitySpace::eval(int element, const std::array<double, 3>& bary, Vec2* values,
                         Grad2* grads) const {
  const std::array<Vec2, 3> gh = hat_gradients(*mesh_, element);
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  const double l[3] = {l0, l1, l2};

  auto scalar_to_vector = [&](int slot, double n, const Vec2& gn) {
    for (int c = 0; c < 2; ++c) {
      Vec2 v{0.0, 0.0};
      v[c] = n;
      values[slot + c] = v;
      Grad2 g;
      g.a[c][0] = gn[0];
      g.a[c][1] = gn[1];
      grads[slot + c] = g;
    }
  };

  if (tag_ == SpaceTag::VEL_P2 || tag_ == SpaceTag::VEL_P2_REDUCED) {
    if (tag_ == SpaceTag::VEL_P2) {
      for (int i = 0; i < 3; ++i) {
        const double n = l[i] * (2.0 * l[i] - 1.0);
        const Vec2 gn{(4.0 * l[i] - 1.0) * gh[i][0], (4.0 * l[i] - 1.0) * gh[i][1]};
        scalar_to_vector(2 * i, n, gn);
      }
    } else {
      for (int i = 0; i < 3; ++i) scalar_to_vector(2 * i, l[i], gh[i]);
    }
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, m = (i + 2) % 3;
      const double bub = l[j] * l[m];
      const Vec2 gbub{l[j] * gh[m][0] + l[m] * gh[j][0], l[j] * gh[m][1] + l[m] * gh[j][1]};
      if (tag_ == SpaceTag::VEL_P2) {
        scalar_to_vector(6 + 2 * i, 4.0 * bub, {4.0 * gbub[0], 4.0 * gbub[1]});
      } else {
        const Vec2 n = edge_normals_[mesh_->element_edges[element][i]];
        values[6 + i] = {n[0] * bub, n[1] * bub};
        Grad2 g;
        for (int c = 0; c < 2; ++c) {
          g.a[c][0] = n[c] * gbub[0];
          g.a[c][1] = n[c] * gbub[1];
        }
        grads[6 + i] = g;
      }
    }
  } else {  // MINI
    for (int i = 0; i < 3; ++i) scalar_to_vector(2 * i, l[i], gh[i]);
    const double bub = l0 * l1 * l2;
    const Vec2 gbub{l1 * l2 * gh[0][0] + l0 * l2 * gh[1][0] + l0 * l1 * gh[2][0],
                    l1 * l2 * gh[0][1] + l0 * l2 * gh[1][1] + l0 * l1 * gh[2][1]};
    scalar_to_vector(6, bub, gbub);
  }
}

VelocityField zero_velocity(const VelocitySpace& space) {
  return {space.tag(), std::vector<double>(space.ndof(), 0.0)};
}

Vec2 velocity_value(const VelocitySpace& space, const VelocityField& u, int element,
                    const std::array<double, 3>& bary) {
  Vec2 vals[12];
  Grad2 grads[12];
  space.eval(element, bary, vals, grads);
  Vec2 out{0.0, 0.0};
  for (int l = 0; l < space.local_count(); ++l) {
    const double c = u.coeff[space.global_dof(element, l)];
    out[0] += c * vals[l][0];
    out[1] += c * vals[l][1];
  }
  return out;
}

Grad2 velocity_gradient(const VelocitySpace& space, const VelocityField& u, int element,
                        const std::array<double, 3>& bary) {
  Vec2 vals[12];
  Grad2 grads[12];
  space.eval(element, bary, vals, grads);
  Grad2 out;
  for (int l = 0; l < space.local_count(); ++l) {
    const double c = u.coeff[space.global_dof(element, l)];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.a[i][j] += c * grads[l].a[i][j];
  }
  return out;
}

VelocityField interpolate_velocity(const VelocitySpace& space,
                                   const std::function<Vec2(Point)>& fn) {
  const SimplicialMesh& mesh = space.mesh();
  VelocityField u = zero_velocity(space);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 val = fn(mesh.vertices[v]);
    u.coeff[2 * v] = val[0];
    u.coeff[2 * v + 1] = val[1];
  }
  const int nv = mesh.num_vertices();
  if (space.tag() == SpaceTag::VEL_P2) {
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const auto& ev = mesh.edges[e];
      const Point mid{0.5 * (mesh.vertices[ev[0]][0] + mesh.vertices[ev[1]][0]),
                      0.5 * (mesh.vertices[ev[0]][1] + mesh.vertices[ev[1]][1])};
      const Vec2 val = fn(mid);
      u.coeff[2 * nv + 2 * e] = val[0];
      u.coeff[2 * nv + 2 * e + 1] = val[1];
    }
  } else if (space.tag() == SpaceTag::VEL_P2_REDUCED) {
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const auto& ev = mesh.edges[e];
      const Point mid{0.5 * (mesh.vertices[ev[0]][0] + mesh.vertices[ev[1]][0]),
                      0.5 * (mesh.vertices[ev[0]][1] + mesh.vertices[ev[1]][1])};
      const Vec2 val = fn(mid);
      const Vec2 a = fn(mesh.vertices[ev[0]]);
      const Vec2 b = fn(mesh.vertices[ev[1]]);
      const Vec2 n = space.edge_normal(e);
      // bubble value at the midpoint is 1/4
      const double excess =
          (val[0] - 0.5 * (a[0] + b[0])) * n[0] + (val[1] - 0.5 * (a[1] + b[1])) * n[1];
      u.coeff[2 * nv + e] = 4.0 * excess;
    }
  }
  return u;
}

bool noflow_satisfied(const VelocitySpace& space, const VelocityField& u, double tol) {
  for (int g = 0; g < space.ndof(); ++g)
    if (space.pinned(g) && std::abs(u.coeff[g]) > tol) return false;
  return true;
}

int pressure_dof_count(const SimplicialMesh& mesh, SpaceTag tag) {
  if (tag == SpaceTag::PRES_P0) return mesh.num_elements();
  if (tag == SpaceTag::PRES_P1) return mesh.num_vertices();
  throw std::invalid_argument("pressure_dof_count: not a pressure tag");
}

StressFieldP0 constant_stress_p0(const SimplicialMesh& mesh, const SymMat& m) {
  return {std::vector<SymMat>(mesh.num_elements(), m)};
}

StressFieldP1 constant_stress_p1(const SimplicialMesh& mesh, const SymMat& m) {
  return {std::vector<SymMat>(mesh.num_vertices(), m)};
}

SymMat stress_value(const SimplicialMesh& mesh, const StressFieldP1& s, int element,
                    const std::array<double, 3>& bary) {
  SymMat out(2);
  for (int i = 0; i < 3; ++i) out += s.value[mesh.elements[element][i]] * bary[i];
  return out;
}

double min_vertex_eigenvalue(const StressFieldP1& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const SymMat& v : s.value) m = std::min(m, min_eigenvalue(v));
  return m;
}

double min_element_eigenvalue(const StressFieldP0& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const SymMat& v : s.value) m = std::min(m, min_eigenvalue(v));
  return m;
}

bool spd_at_vertices(const StressFieldP1& s, double floor) {
  return min_vertex_eigenvalue(s) > floor;
}

StressFieldP1 interpolate_vertexwise(const SimplicialMesh& mesh,
                                     const std::vector<SymMat>& vertex_values) {
  if (static_cast<int>(vertex_values.size()) != mesh.num_vertices())
    throw std::invalid_argument("interpolate_vertexwise: one value per mesh vertex required");
  return {vertex_values};
}

std::vector<double> interpolate_vertexwise_scalar(const SimplicialMesh& mesh,
                                                  const std::vector<double>& vertex_values) {
  if (static_cast<int>(vertex_values.size()) != mesh.num_vertices())
    throw std::invalid_argument("interpolate_vertexwise: one value per mesh vertex required");
  return vertex_values;
}

std::vector<double> lumped_vertex_weights(const SimplicialMesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double share = mesh.element_area(k) / 3.0;
    for (int i = 0; i < 3; ++i) w[mesh.elements[k][i]] += share;
  }
  return w;
}

double lumped_integral(const SimplicialMesh& mesh, const StressFieldP1& chi,
                       const StressFieldP1& phi) {
  if (chi.value.size() != phi.value.size() ||
      static_cast<int>(chi.value.size()) != mesh.num_vertices())
    throw std::invalid_argument("lumped_integral: fields must live on the same mesh");
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double share = mesh.element_area(k) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.elements[k][i];
      s += share * chi.value[v].dot(phi.value[v]);
    }
  }
  return s;
}

double lumped_integral_scalar(const SimplicialMesh& mesh, const std::vector<double>& a,
                              const std::vector<double>& b) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != mesh.num_vertices())
    throw std::invalid_argument("lumped_integral: fields must live on the same mesh");
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double share = mesh.element_area(k) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.elements[k][i];
      s += share * a[v] * b[v];
    }
  }
  return s;
}

double p1_mass_integral(const SimplicialMesh& mesh, const std::vector<double>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    const auto& el = mesh.elements[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        s += area / 12.0 * (i == j ? 2.0 : 1.0) * a[el[i]] * b[el[j]];
  }
  return s;
}

double p1_mass_integral(const SimplicialMesh& mesh, const StressFieldP1& a,
                        const StressFieldP1& b) {
  double s = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    const auto& el = mesh.elements[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        s += area / 12.0 * (i == j ? 2.0 : 1.0) * a.value[el[i]].dot(b.value[el[j]]);
  }
  return s;
}

double quadrature_integral(const SimplicialMesh& mesh, int element, int degree,
                           const std::function<double(Point)>& f) {
  const TriangleRule& rule = triangle_rule(degree);
  const double area = mesh.element_area(element);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    s += rule.weights[q] * f(mesh.from_barycentric(element, rule.points[q]));
  return area * s;
}

UpwindTrace facet_upwind_trace(const VelocitySpace& space, const VelocityField& u,
                               const StressFieldP0& field, int facet_index, const Point& x) {
  const SimplicialMesh& mesh = space.mesh();
  if (facet_index < 0 || facet_index >= static_cast<int>(mesh.internal_facets.size()))
    throw std::invalid_argument("facet_upwind_trace: facet is not internal");
  const InternalFacet& f = mesh.internal_facets[facet_index];
  const Vec2 vel = velocity_value(space, u, f.left, mesh.barycentric(f.left, x));
  const double un = vel[0] * f.normal[0] + vel[1] * f.normal[1];
  UpwindTrace t;
  t.speed = std::abs(un);
  if (un > 0.0) {
    t.downstream = field.value[f.right];
    t.upstream = field.value[f.left];
    t.downstream_element = f.right;
  } else if (un < 0.0) {
    t.downstream = field.value[f.left];
    t.upstream = field.value[f.right];
    t.downstream_element = f.left;
  } else {
    t.downstream = SymMat(2);
    t.upstream = SymMat(2);
    t.jump = SymMat(2);
    return t;
  }
  t.jump = t.downstream - t.upstream;
  return t;
}

std::vector<double> discrete_divfree_residual(const VelocitySpace& space,
                                              const VelocityField& u, SpaceTag pressure) {
  if (!lbb_whitelisted(space.tag(), pressure))
    throw std::invalid_argument("discrete_divfree_residual: pair is not LBB-whitelisted");
  const SimplicialMesh& mesh = space.mesh();
  std::vector<double> r(pressure_dof_count(mesh, pressure), 0.0);
  const TriangleRule& rule = triangle_rule(4);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double area = mesh.element_area(k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = area * rule.weights[q];
      const double div = velocity_gradient(space, u, k, rule.points[q]).divergence();
      if (pressure == SpaceTag::PRES_P0) {
        r[k] += w * div;
      } else {
        for (int i = 0; i < 3; ++i) r[mesh.elements[k][i]] += w * rule.points[q][i] * div;
      }
    }
  }
  return r;
}

}  // namespace obflow

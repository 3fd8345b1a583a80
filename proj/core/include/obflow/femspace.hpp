#ifndef OBFLOW_FEMSPACE_HPP
#define OBFLOW_FEMSPACE_HPP

#include <functional>
#include <vector>

#include "obflow/mesh.hpp"
#include "obflow/tensor.hpp"

namespace obflow {

enum class SpaceTag { VEL_P2, VEL_P2_REDUCED, VEL_MINI, PRES_P0, PRES_P1, STRESS_P0, STRESS_P1 };

const char* space_name(SpaceTag tag);

/// Velocity/pressure pairs with a known discrete inf-sup constant; LBB
/// constants themselves are never computed.
bool lbb_whitelisted(SpaceTag velocity, SpaceTag pressure);

/// 2x2 velocity gradient, a[i][j] = du_i/dx_j.
struct Grad2 {
  double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double divergence() const { return a[0][0] + a[1][1]; }
  double norm2() const {
    return a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
  }
};

/// Conforming velocity space with no-flow boundary DOFs identified.
///
/// DOF layouts (c = component 0..1):
///   VEL_P2:          2*v+c at vertices, 2*NV + 2*e+c at edge midpoints
///   VEL_P2_REDUCED:  2*v+c at vertices, 2*NV + e for the facet-normal
///                    quadratic bubble of edge e (one scalar per edge)
///   VEL_MINI:        2*v+c at vertices, 2*NV + 2*k+c element bubbles
class VelocitySpace {
public:
  VelocitySpace(const SimplicialMesh& mesh, SpaceTag tag);

  SpaceTag tag() const { return tag_; }
  const SimplicialMesh& mesh() const { return *mesh_; }
  int ndof() const { return ndof_; }
  int local_count() const { return local_count_; }
  int global_dof(int element, int local) const;
  bool pinned(int gdof) const { return pinned_[gdof] != 0; }
  const std::vector<char>& pinned_flags() const { return pinned_; }

  /// Values and gradients of all local vector basis functions at a
  /// barycentric point of `element`.
  void eval(int element, const std::array<double, 3>& bary, Vec2* values, Grad2* grads) const;

  /// Unit normal used by the reduced space's edge bubbles (global per edge,
  /// so the basis is continuous across elements).
  Vec2 edge_normal(int edge) const { return edge_normals_[edge]; }

private:
  const SimplicialMesh* mesh_;
  SpaceTag tag_;
  int ndof_ = 0;
  int local_count_ = 0;
  std::vector<char> pinned_;
  std::vector<Vec2> edge_normals_;
};

struct VelocityField {
  SpaceTag space = SpaceTag::VEL_P2;
  std::vector<double> coeff;
};

VelocityField zero_velocity(const VelocitySpace& space);
Vec2 velocity_value(const VelocitySpace& space, const VelocityField& u, int element,
                    const std::array<double, 3>& bary);
Grad2 velocity_gradient(const VelocitySpace& space, const VelocityField& u, int element,
                        const std::array<double, 3>& bary);
/// Nodal interpolation of an analytic field (P2: vertices + midpoints;
/// MINI/P2_REDUCED: vertices, bubble corrections at midpoints for the
/// reduced space; MINI bubbles are left at zero).
VelocityField interpolate_velocity(const VelocitySpace& space,
                                   const std::function<Vec2(Point)>& fn);
bool noflow_satisfied(const VelocitySpace& space, const VelocityField& u, double tol = 0.0);

struct PressureField {
  SpaceTag space = SpaceTag::PRES_P0;
  std::vector<double> coeff;
};

int pressure_dof_count(const SimplicialMesh& mesh, SpaceTag tag);

/// Piecewise-constant symmetric stress, one SymMat per element.
struct StressFieldP0 {
  std::vector<SymMat> value;
};

/// Continuous piecewise-linear symmetric stress, one SymMat per vertex.
struct StressFieldP1 {
  std::vector<SymMat> value;
};

StressFieldP0 constant_stress_p0(const SimplicialMesh& mesh, const SymMat& m);
StressFieldP1 constant_stress_p1(const SimplicialMesh& mesh, const SymMat& m);
SymMat stress_value(const SimplicialMesh& mesh, const StressFieldP1& s, int element,
                    const std::array<double, 3>& bary);
double min_vertex_eigenvalue(const StressFieldP1& s);
double min_element_eigenvalue(const StressFieldP0& s);
bool spd_at_vertices(const StressFieldP1& s, double floor = 0.0);

/// The interpolation operator pi_h: one value per mesh vertex.
/// Throws std::invalid_argument on a length mismatch.
StressFieldP1 interpolate_vertexwise(const SimplicialMesh& mesh,
                                     const std::vector<SymMat>& vertex_values);
std::vector<double> interpolate_vertexwise_scalar(const SimplicialMesh& mesh,
                                                  const std::vector<double>& vertex_values);

/// Vertex-rule weights: omega_q = sum_{K owning q} |K|/(d+1).
std::vector<double> lumped_vertex_weights(const SimplicialMesh& mesh);

/// int_D pi_h[chi : phi] by the vertex rule.
double lumped_integral(const SimplicialMesh& mesh, const StressFieldP1& chi,
                       const StressFieldP1& phi);
double lumped_integral_scalar(const SimplicialMesh& mesh, const std::vector<double>& a,
                              const std::vector<double>& b);

/// Exact integral of the product of two P1 scalar fields (consistent mass).
double p1_mass_integral(const SimplicialMesh& mesh, const std::vector<double>& a,
                        const std::vector<double>& b);
double p1_mass_integral(const SimplicialMesh& mesh, const StressFieldP1& a,
                        const StressFieldP1& b);

/// Integrate an arbitrary function over one element with a symmetric Gauss
/// rule exact to `degree` (<= 6).
double quadrature_integral(const SimplicialMesh& mesh, int element, int degree,
                           const std::function<double(Point)>& f);

/// Downstream/upstream trace data of a P0 stress field at a point of an
/// internal facet. When u.n = 0 the facet contributes nothing (speed 0).
struct UpwindTrace {
  SymMat downstream;
  SymMat upstream;
  SymMat jump;      // downstream - upstream
  double speed = 0.0;  // |u.n|
  int downstream_element = -1;
};
UpwindTrace facet_upwind_trace(const VelocitySpace& space, const VelocityField& u,
                               const StressFieldP0& field, int facet_index, const Point& x);

/// Vector of int_D q_i div(u) over the pressure basis; u lies in the
/// discretely divergence-free space iff every entry vanishes.
std::vector<double> discrete_divfree_residual(const VelocitySpace& space,
                                              const VelocityField& u, SpaceTag pressure);

}  // namespace obflow

#endif

// Internal assembly helpers shared by the two schemes. Not installed.
#ifndef OBFLOW_ASSEMBLY_DETAIL_HPP
#define OBFLOW_ASSEMBLY_DETAIL_HPP

#include <array>
#include <functional>
#include <vector>

#include "obflow/femspace.hpp"
#include "obflow/linsolve.hpp"
#include "obflow/quadrature.hpp"
#include "obflow/scheme_common.hpp"

namespace obflow::detail {

inline constexpr int kVolumeDegree = 4;  // momentum/stress volume terms
inline constexpr int kDataDegree = 6;    // initial data and analytic loads

struct VelLayout {
  std::vector<int> map;        // gdof -> equation index, -1 if pinned
  std::vector<int> free_list;  // equation index -> gdof
  int nu = 0;
};

VelLayout make_vel_layout(const VelocitySpace& vs);

/// Coupling stress field B(x) contracted with grad(v) in the momentum
/// equation; elementwise constant for the P0 scheme, P1-interpolated for
/// the diffusive scheme.
using BetaField = std::function<SymMat(int element, const std::array<double, 3>& bary)>;

inline double contract(const SymMat& m, const Grad2& g) {
  return m(0, 0) * g.a[0][0] + m(0, 1) * (g.a[0][1] + g.a[1][0]) + m(1, 1) * g.a[1][1];
}

inline double grad_inner(const Grad2& x, const Grad2& y) {
  return x.a[0][0] * y.a[0][0] + x.a[0][1] * y.a[0][1] + x.a[1][0] * y.a[1][0] +
         x.a[1][1] * y.a[1][1];
}

inline int pressure_local_count(SpaceTag tag) { return tag == SpaceTag::PRES_P0 ? 1 : 3; }

inline int pressure_global(const SimplicialMesh& mesh, SpaceTag tag, int element, int local) {
  return tag == SpaceTag::PRES_P0 ? element : mesh.elements[element][local];
}

inline double pressure_basis(SpaceTag tag, const std::array<double, 3>& bary, int local) {
  return tag == SpaceTag::PRES_P0 ? 1.0 : bary[local];
}

struct MomentumMatrixOpts {
  double mass_coeff = 1.0;        // Re/dt for a scheme step, 1 for projections
  double convection_coeff = 0.0;  // Re/2 for a scheme step
  double viscous_coeff = 0.0;     // (1-eps) for a step, dt0 for the P1 projection
};

/// Saddle-point matrix over [free velocity | pressure | mean-zero
/// multiplier]; the convecting velocity is the previous time level.
SparseMatrix assemble_momentum_matrix(const VelocitySpace& vs, SpaceTag pres,
                                      const VelLayout& lay, const MomentumMatrixOpts& opts,
                                      const VelocityField* u_prev);

/// RHS over the same layout: reduced load + mass_coeff (u_prev, v_i)
///   - coupling_coeff int B : grad v_i.
std::vector<double> momentum_rhs(const VelocitySpace& vs, SpaceTag pres, const VelLayout& lay,
                                 double mass_coeff, const VelocityField* u_prev,
                                 const LoadVector* load, const BetaField& beta_at,
                                 double coupling_coeff);

/// Momentum + continuity rows of the nonlinear residual, written into
/// out[0 .. nu+np).
void momentum_residual_rows(const VelocitySpace& vs, SpaceTag pres, const VelLayout& lay,
                            const FluidParams& fp, const VelocityField& u_prev,
                            const VelocityField& u_cand, const PressureField& p_cand,
                            const LoadVector& load, const BetaField& beta_at,
                            double coupling_coeff, double dt, std::vector<double>& out);

double kinetic_integral(const VelocitySpace& vs, const VelocityField& u);
double grad_norm2_integral(const VelocitySpace& vs, const VelocityField& u);

/// Skew convection form tested with u itself; vanishes up to roundoff and is
/// reported by the audits as a cancellation check.
double convection_skew_value(const VelocitySpace& vs, const FluidParams& fp,
                             const VelocityField& u_prev, const VelocityField& u);

/// int_K of each velocity component over one element (degree-4 rule).
Vec2 element_velocity_integral(const VelocitySpace& vs, const VelocityField& u, int element);

/// coeff * int grad(eta_q) . grad(eta_p), accumulated with offsets.
void add_p1_stiffness(SparseMatrix& a, const SimplicialMesh& mesh, double coeff, int row_offset,
                      int col_offset);

std::vector<double> reduce_load(const VelLayout& lay, const LoadVector& load);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double inf_norm(const std::vector<double>& v);

/// Runs fn(k) for k in [0, n), possibly on several threads; results must be
/// written to per-k slots so the reduction order stays deterministic.
void for_each_element(int n, const std::function<void(int)>& fn);

}  // namespace obflow::detail

#endif

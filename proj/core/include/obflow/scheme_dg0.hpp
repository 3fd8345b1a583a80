#ifndef OBFLOW_SCHEME_DG0_HPP
#define OBFLOW_SCHEME_DG0_HPP

#include <memory>

#include "obflow/femspace.hpp"
#include "obflow/lambda.hpp"
#include "obflow/scheme_common.hpp"
#include "obflow/tensor.hpp"

namespace obflow {

/// One time level of the piecewise-constant-stress scheme.
struct DiscreteStateDG0 {
  VelocityField velocity;
  StressFieldP0 stress;
  double time = 0.0;
};

struct Dg0StepResult {
  DiscreteStateDG0 state;
  PressureField pressure;
  PicardReport picard;
};

/// Backward-Euler scheme with DG-upwinded P0 stress: residual assembly,
/// damped-Picard step, free energy and the per-step energy audit.
///
/// The discretely divergence-free velocity space is realized by keeping the
/// pressure as a Lagrange multiplier; residual vectors are laid out as
/// [momentum rows over free velocity DOFs | continuity rows | stress rows],
/// with stress rows tested against the element basis tensors
/// E_xx, E_xy (unit off-diagonal pair), E_yy.
class Dg0Scheme {
public:
  Dg0Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag, const FluidParams& fluid,
            const RegParams& reg);

  const SimplicialMesh& mesh() const { return *mesh_; }
  const VelocitySpace& velocity_space() const { return vspace_; }
  SpaceTag pressure_tag() const { return SpaceTag::PRES_P0; }
  const FluidParams& fluid() const { return fluid_; }
  const StressCalculus& calculus() const { return calc_; }

  int residual_size() const;

  std::vector<double> residual(const DiscreteStateDG0& prev, const DiscreteStateDG0& cand,
                               const PressureField& pressure, const LoadVector& f,
                               double dt) const;

  /// `iterate_seed`, when given, is the Picard starting iterate (the
  /// previous time level remains `prev`); used by the delta-continuation.
  Dg0StepResult step(const DiscreteStateDG0& prev, const PressureField& pressure_prev,
                     const LoadVector& f, double dt, const SolverOpts& opts,
                     const DiscreteStateDG0* iterate_seed = nullptr) const;

  /// F_delta = Re/2 int ||u||^2 + eps/(2 Wi) sum_k |K_k| tr(sigma_k - G(sigma_k) - I).
  double energy(const DiscreteStateDG0& state) const;

  EnergyBreakdown energy_audit(const DiscreteStateDG0& prev, const DiscreteStateDG0& next,
                               const LoadVector& f, double dt) const;

  /// L2 projections of the initial data: velocity into the discretely
  /// divergence-free subspace, stress elementwise averaged.
  DiscreteStateDG0 project_initial(const std::function<Vec2(Point)>& u0,
                                   const std::function<SymMat(Point)>& sigma0) const;

  /// Residual of the unregularized scheme (beta replaced by sigma itself)
  /// at the same states; used by the delta-continuation diagnostics.
  std::vector<double> unregularized_residual(const DiscreteStateDG0& prev,
                                             const DiscreteStateDG0& cand,
                                             const PressureField& pressure, const LoadVector& f,
                                             double dt) const;

private:
  const SimplicialMesh* mesh_;
  VelocitySpace vspace_;
  FluidParams fluid_;
  RegParams reg_;
  StressCalculus calc_;
  std::vector<int> vmap_;  // velocity gdof -> equation index (-1 pinned)
  int nu_ = 0, np_ = 0, ns_ = 0;
};

}  // namespace obflow

#endif

#ifndef OBFLOW_SCHEME_FEM1_HPP
#define OBFLOW_SCHEME_FEM1_HPP

#include <functional>
#include <optional>

#include "obflow/femspace.hpp"
#include "obflow/lambda.hpp"
#include "obflow/scheme_common.hpp"
#include "obflow/tensor.hpp"

namespace obflow {

/// One time level of the diffusive continuous-P1-stress scheme.
struct DiscreteStateFEM1 {
  VelocityField velocity;
  StressFieldP1 stress;
  double time = 0.0;
};

struct Fem1StepResult {
  DiscreteStateFEM1 state;
  PressureField pressure;
  PicardReport picard;
};

/// Projected initial data (the two smoothed projections) together with the
/// stability quantities they are bounded by.
struct InitialFields {
  VelocityField velocity;
  StressFieldP1 stress;
  PressureField pressure;
  double l2_velocity = 0.0;       // int ||u0_h||^2
  double l2_stress = 0.0;         // int ||sigma0_h||^2
  double h1_velocity_dt0 = 0.0;   // dt0 int ||grad u0_h||^2
  double h1_stress_dt0 = 0.0;     // dt0 int ||grad sigma0_h||^2
};

/// Backward-Euler scheme with continuous P1 stress: stress diffusion,
/// vertex-rule (lumped) products, the Lambda transport tensor, optional
/// cut-off, and the delta-free variant with an SPD-at-vertices precondition.
///
/// Residual layout: [momentum rows over free velocity DOFs | continuity rows
/// over P1 pressure | stress rows per vertex and packed component].
class Fem1Scheme {
public:
  /// The delta-regularized scheme (P^(L,)dt_{alpha,delta,h}).
  Fem1Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag, const FluidParams& fluid,
             const RegParams& reg);
  /// The unregularized scheme (P^(L,)dt_{alpha,h}); iterates must stay SPD
  /// at the vertices.
  Fem1Scheme(const SimplicialMesh& mesh, SpaceTag velocity_tag, const FluidParams& fluid,
             std::optional<double> cutoff, bool unregularized);

  const SimplicialMesh& mesh() const { return *mesh_; }
  const VelocitySpace& velocity_space() const { return vspace_; }
  SpaceTag pressure_tag() const { return SpaceTag::PRES_P1; }
  const FluidParams& fluid() const { return fluid_; }
  const StressCalculus& calculus() const { return calc_; }
  bool unregularized() const { return !calc_.is_regularized(); }
  /// True when alpha > 0 and delta-regularized: the regime covered by the
  /// stability theory. alpha = 0 runs are accepted but labelled.
  bool analyzed_regime() const;

  int residual_size() const;

  std::vector<double> residual(const DiscreteStateFEM1& prev, const DiscreteStateFEM1& cand,
                               const PressureField& pressure, const LoadVector& f,
                               double dt) const;

  /// `iterate_seed`, when given, is the Picard starting iterate (the
  /// previous time level remains `prev`); used by the delta-continuation.
  Fem1StepResult step(const DiscreteStateFEM1& prev, const PressureField& pressure_prev,
                      const LoadVector& f, double dt, const SolverOpts& opts,
                      const DiscreteStateFEM1* iterate_seed = nullptr) const;

  /// F = Re/2 int ||u||^2 + eps/(2 Wi) sum_q omega_q tr(sigma_q - G(sigma_q) - I).
  double energy(const DiscreteStateFEM1& state) const;

  EnergyBreakdown energy_audit(const DiscreteStateFEM1& prev, const DiscreteStateFEM1& next,
                               const LoadVector& f, double dt) const;

  /// The smoothed projections of the initial data; preserves the eigenvalue
  /// bounds of sigma0 at every vertex on a non-obtuse mesh.
  InitialFields project_initial_fields(const std::function<Vec2(Point)>& u0,
                                       const std::function<SymMat(Point)>& sigma0,
                                       double dt0) const;

private:
  const SimplicialMesh* mesh_;
  VelocitySpace vspace_;
  FluidParams fluid_;
  StressCalculus calc_;
  std::vector<int> vmap_;
  std::vector<double> lumped_;  // vertex weights
  int nu_ = 0, np_ = 0, ns_ = 0;
};

}  // namespace obflow

#endif

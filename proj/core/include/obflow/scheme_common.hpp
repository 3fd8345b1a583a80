#ifndef OBFLOW_SCHEME_COMMON_HPP
#define OBFLOW_SCHEME_COMMON_HPP

#include <functional>
#include <vector>

#include "obflow/femspace.hpp"

namespace obflow {

struct FluidParams {
  double reynolds = 1.0;
  double weissenberg = 1.0;
  double viscosity_fraction = 0.5;  // epsilon in (0,1)
  double diffusion = 0.0;           // alpha >= 0 (0 for the P0 scheme)
  void validate() const;            // throws std::invalid_argument
};

struct SolverOpts {
  double tol = 1e-10;       // residual infinity norm
  int max_iter = 200;
  double audit_tol = 1e-9;
  double theta_min = 1e-8;  // damping floor before a step is declared failed
};

struct PicardReport {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;
};

/// Per-step free-energy ledger. All quantities use the same quadrature as
/// the assembled scheme, so the slack identity
///   slack = forcing - [(total - prev_total)/dt + velocity_increment
///           + viscous + stress + diffusion dissipation]
/// is exact bookkeeping.
struct EnergyBreakdown {
  double total = 0.0;       // F at the new time level
  double prev_total = 0.0;  // F at the previous level
  double kinetic = 0.0;
  double entropy = 0.0;
  double velocity_increment = 0.0;     // Re/(2 dt) int ||u^n - u^{n-1}||^2
  double viscous_dissipation = 0.0;    // (1-eps) int ||grad u^n||^2
  double stress_dissipation = 0.0;     // eps/(2 Wi^2) tr(beta + beta^{-1} - 2I)
  double diffusion_dissipation = 0.0;  // alpha eps delta^2/(2 Wi) ||grad pi_h G'||^2
  double forcing_pairing = 0.0;        // <f^n, u^n>
  double slack = 0.0;
  double dt = 0.0;
  /// P0 scheme: telescoped facet sum of tr(sigma - G(sigma)); P1 scheme:
  /// transport pairing int u^{n-1}. grad pi_h[tr H(G'(sigma^n))]. Zero for a
  /// discretely divergence-free transport velocity.
  double edge_telescoping = 0.0;
  /// Skew-symmetrized convection form tested with u^n; vanishes by
  /// construction, reported as a cancellation check.
  double convection_skew = 0.0;
};

/// Discrete forcing functional: a load vector over all velocity DOFs.
using LoadVector = std::vector<double>;

std::vector<double> assemble_load(const VelocitySpace& space,
                                  const std::function<Vec2(Point)>& f, int degree = 4);

/// Element-parallel assembly toggle (default off). Per-element contributions
/// are reduced in element order either way, so traces stay bit-stable.
void set_parallel_assembly(bool on);
bool parallel_assembly_enabled();

}  // namespace obflow

#endif

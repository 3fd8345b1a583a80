#ifndef OBFLOW_SCENARIOS_HPP
#define OBFLOW_SCENARIOS_HPP

#include <cstdint>

#include "obflow/scheme_dg0.hpp"
#include "obflow/scheme_fem1.hpp"

namespace obflow {

/// Initial-condition library shared by the CLI and the test drivers.
///   equilibrium:  u = 0, sigma = I (exact discrete equilibrium)
///   random-spd:   u = 0, sigma sampled per element/vertex as R diag(l1,l2) R^T
///                 with eigenvalues uniform in [lambda_min, lambda_max]
///   cavity:       a smooth interior vortex (zero trace) with sigma = I,
///                 projected into the discrete spaces
struct Scenario {
  enum class Kind { Equilibrium, RandomSpd, LidDrivenCavity };
  Kind kind = Kind::Equilibrium;
  double lambda_min = 0.5;
  double lambda_max = 2.0;
  std::uint64_t seed = 1;
};

/// The analytic cavity vortex (stream function psi = 16 (x(1-x)y(1-y))^2 on
/// the unit square, mapped to `domain`); divergence-free with zero trace.
Vec2 cavity_velocity(const Rect& domain, Point x);

DiscreteStateDG0 make_initial_dg0(const Dg0Scheme& scheme, const Scenario& scenario,
                                  const Rect& domain);
DiscreteStateFEM1 make_initial_fem1(const Fem1Scheme& scheme, const Scenario& scenario,
                                    const Rect& domain, double dt0);

/// Smooth SPD tensor field with eigenvalues confined to
/// [lambda_min, lambda_max] by construction; used for projection tests.
SymMat smooth_spd_field(double lambda_min, double lambda_max, std::uint64_t seed, Point x);

}  // namespace obflow

#endif

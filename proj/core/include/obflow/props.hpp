#ifndef OBFLOW_PROPS_HPP
#define OBFLOW_PROPS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "obflow/tensor.hpp"

namespace obflow {

/// Test tolerances, one configuration record so CI can tighten them in one
/// place. Signs follow the checks: inequalities pass with slack >= -tol.
struct TestTolerances {
  double spectral_orthogonality = 1e-13;
  double spectral_reconstruction = 1e-12;  // relative to 1 + ||phi||
  double inverse_identity = 1e-12;
  double positivity = 1e-12;       // dissipation/entropy nonnegativity
  double inequality_slack = 1e-10;  // concavity, monotonicity, entropy bounds
  double chain_identity = 1e-10;   // Lambda chain rule, H'(G') = beta
  double telescoping = 1e-10;
  double divfree = 1e-11;
  double audit = 1e-9;
};

const TestTolerances& tolerances();

struct PropertyResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // worst slack (inequalities) or worst error (identities)
  double tolerance = 0.0;
  std::string detail;
};

/// Random symmetric matrix with entries uniform in [-scale, scale].
SymMat random_symmetric(int dim, std::uint64_t& state, double scale = 3.0);
/// Random SPD matrix with eigenvalues uniform in [lmin, lmax].
SymMat random_spd(int dim, std::uint64_t& state, double lmin, double lmax);

/// Spectral-calculus inequality sweep over
/// (d, delta, L) in {2,3} x {0.5, 0.1, 0.01} x {2, 10, none}.
std::vector<PropertyResult> lemma21_suite(int samples_per_combo, std::uint64_t seed);

/// Discrete gradient inequality for monotone Lipschitz g on the non-obtuse
/// structured mesh (scalar and tensor P1 fields, g = negative part and -G').
std::vector<PropertyResult> nonobtuse_gradient_suite(int mesh_n, int fields, std::uint64_t seed);

/// Lambda transport chain identity on random SPD P1 fields, with and without
/// the cut-off, plus the L-infinity cut-off bound.
std::vector<PropertyResult> lambda_chain_suite(int mesh_n, int fields, std::uint64_t seed);

/// Elementwise gap || Lambda_mp - beta delta_mp || for a fixed smooth SPD
/// field on refining meshes; reports the observed convergence order in h.
struct SlopeResult {
  std::vector<int> mesh_sizes;
  std::vector<double> gaps;
  double order = 0.0;
};
SlopeResult lambda_consistency_slope(const std::vector<int>& mesh_sizes);

/// Vertex-rule facts: the hand-computable unit-triangle values, the lumping
/// sandwich with measured constant <= d+2, and vertex-sampling domination.
std::vector<PropertyResult> lumping_suite(int mesh_n, int fields, std::uint64_t seed);

}  // namespace obflow

#endif

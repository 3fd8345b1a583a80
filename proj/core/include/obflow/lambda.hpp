#ifndef OBFLOW_LAMBDA_HPP
#define OBFLOW_LAMBDA_HPP

#include <array>

#include "obflow/femspace.hpp"
#include "obflow/mesh.hpp"
#include "obflow/tensor.hpp"

namespace obflow {

/// Reference-edge transport block: the convex combination
///   (1 - lambda) beta(phi_j) + lambda beta(phi_0)
/// whose contraction with G'(phi_j) - G'(phi_0) telescopes the discrete
/// chain rule  tr H(G'(phi_j)) - tr H(G'(phi_0)) exactly.
struct LambdaHat {
  SymMat value;
  double lambda = 0.0;     // in [0, 1]
  bool endpoint_case = false;  // beta(phi_j) = beta(phi_0) branch
};

LambdaHat lambda_hat_full(const SymMat& phi_j, const SymMat& phi_0, const StressCalculus& calc);
SymMat lambda_hat(const SymMat& phi_j, const SymMat& phi_0, const RegParams& p);

/// Element transport tensor: d x d array of symmetric blocks
///   Lambda_{m,p} = sum_j [(B^T)^{-1}]_{mj} LambdaHat_j [B^T]_{jp}.
struct LambdaTensor {
  std::array<std::array<SymMat, 2>, 2> block;
};

LambdaTensor lambda_tensor(const SimplicialMesh& mesh, int element, const StressFieldP1& stress,
                           const StressCalculus& calc);
LambdaTensor lambda_tensor(const SimplicialMesh& mesh, int element, const StressFieldP1& stress,
                           const RegParams& p);

/// Max over m of | sum_p Lambda_{m,p} : d_p pi_h[G'(sigma)]
///                 - d_m pi_h[tr H(G'(sigma))] |  on the element.
double lambda_chain_residual(const SimplicialMesh& mesh, int element,
                             const StressFieldP1& stress, const StressCalculus& calc);

}  // namespace obflow

#endif

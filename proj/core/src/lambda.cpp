#include "obflow/lambda.hpp"

#include <cmath>

namespace obflow {

LambdaHat lambda_hat_full(const SymMat& phi_j, const SymMat& phi_0, const StressCalculus& calc) {
  const SymMat beta_j = calc.beta(phi_j);
  const SymMat beta_0 = calc.beta(phi_0);
  const SymMat gp_j = calc.g_prime(phi_j);
  const SymMat gp_0 = calc.g_prime(phi_0);
  const SymMat dgp = gp_j - gp_0;

  LambdaHat out;
  const double denom = (beta_j - beta_0).dot(dgp);
  // The denominator vanishes exactly when beta(phi_j) = beta(phi_0), where
  // both branches agree; the guard absorbs roundoff.
  if (std::abs(denom) <= 1e-12 * (1.0 + beta_j.norm() * dgp.norm())) {
    out.value = beta_j;
    out.lambda = 0.0;
    out.endpoint_case = true;
    return out;
  }
  const double trh_j = calc.trace_h_of_gprime(phi_j);
  const double trh_0 = calc.trace_h_of_gprime(phi_0);
  const double lambda = (trh_j - trh_0 - beta_j.dot(dgp)) / (-denom);
  out.lambda = lambda;
  out.value = beta_j * (1.0 - lambda) + beta_0 * lambda;
  return out;
}

SymMat lambda_hat(const SymMat& phi_j, const SymMat& phi_0, const RegParams& p) {
  return lambda_hat_full(phi_j, phi_0, StressCalculus::regularized(p)).value;
}

LambdaTensor lambda_tensor(const SimplicialMesh& mesh, int element, const StressFieldP1& stress,
                           const StressCalculus& calc) {
  const AffineMap map = reference_map(mesh, element);
  const auto& el = mesh.elements[element];
  const SymMat& phi_0 = stress.value[el[0]];
  std::array<SymMat, 2> hat;
  for (int j = 0; j < 2; ++j)
    hat[j] = lambda_hat_full(stress.value[el[j + 1]], phi_0, calc).value;

  // (B^T)^{-1}_{mj} = binv[j][m] transposed of the stored inverse; B^T_{jp} = b[p][j]
  LambdaTensor t;
  for (int m = 0; m < 2; ++m)
    for (int p = 0; p < 2; ++p) {
      SymMat block(2);
      for (int j = 0; j < 2; ++j) {
        const double binvT_mj = map.binv[2 * j + m];
        const double bT_jp = map.b[2 * p + j];
        block += hat[j] * (binvT_mj * bT_jp);
      }
      t.block[m][p] = block;
    }
  return t;
}

LambdaTensor lambda_tensor(const SimplicialMesh& mesh, int element, const StressFieldP1& stress,
                           const RegParams& p) {
  return lambda_tensor(mesh, element, stress, StressCalculus::regularized(p));
}

double lambda_chain_residual(const SimplicialMesh& mesh, int element,
                             const StressFieldP1& stress, const StressCalculus& calc) {
  const LambdaTensor t = lambda_tensor(mesh, element, stress, calc);
  const auto& el = mesh.elements[element];
  const std::array<Vec2, 3> gh = hat_gradients(mesh, element);

  // gradients of the P1 interpolants of G'(sigma) and tr H(G'(sigma))
  std::array<SymMat, 3> gp;
  std::array<double, 3> trh;
  for (int i = 0; i < 3; ++i) {
    gp[i] = calc.g_prime(stress.value[el[i]]);
    trh[i] = calc.trace_h_of_gprime(stress.value[el[i]]);
  }
  std::array<SymMat, 2> dgp;   // d_p pi_h[G'(sigma)]
  Vec2 dtrh{0.0, 0.0};         // grad pi_h[tr H(G'(sigma))]
  for (int p = 0; p < 2; ++p) {
    SymMat acc(2);
    for (int i = 0; i < 3; ++i) acc += gp[i] * gh[i][p];
    dgp[p] = acc;
  }
  for (int i = 0; i < 3; ++i) {
    dtrh[0] += trh[i] * gh[i][0];
    dtrh[1] += trh[i] * gh[i][1];
  }

  double worst = 0.0;
  for (int m = 0; m < 2; ++m) {
    double lhs = 0.0;
    for (int p = 0; p < 2; ++p) lhs += t.block[m][p].dot(dgp[p]);
    worst = std::max(worst, std::abs(lhs - dtrh[m]));
  }
  return worst;
}

}  // namespace obflow

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obflow/lambda.hpp"
#include "obflow/props.hpp"

using namespace obflow;

TEST_CASE("equal endpoints return beta (case b)") {
  const RegParams reg{0.1, {}};
  const SymMat id = SymMat::identity(2);
  const SymMat lh = lambda_hat(id, id, reg);
  CHECK((lh - id).norm() == 0.0);

  const StressCalculus calc = StressCalculus::regularized(reg);
  const LambdaHat full = lambda_hat_full(id, id, calc);
  CHECK(full.endpoint_case);
}

TEST_CASE("scalar secant relation on commuting endpoints") {
  // phi_j = 2I, phi_0 = I/2, delta = 0.1: everything reduces to scalar
  // closed forms evaluated independently here
  const RegParams reg{0.1, {}};
  const StressCalculus calc = StressCalculus::regularized(reg);
  const SymMat phi_j = SymMat::diag(2.0, 2.0);
  const SymMat phi_0 = SymMat::diag(0.5, 0.5);

  const double beta_j = 2.0, beta_0 = 0.5;
  const double gp_j = 1.0 / beta_j, gp_0 = 1.0 / beta_0;
  const double trh_j = 2.0 * std::log(gp_j);  // H = G^{1/delta}, arguments < 10
  const double trh_0 = 2.0 * std::log(gp_0);
  const double denom = (beta_0 - beta_j) * (gp_j - gp_0) * 2.0;
  const double lambda =
      (trh_j - trh_0 - beta_j * (gp_j - gp_0) * 2.0) / denom;
  CHECK(lambda == doctest::Approx((6.0 - 4.0 * std::log(2.0)) / 4.5).epsilon(1e-14));

  const LambdaHat got = lambda_hat_full(phi_j, phi_0, calc);
  CHECK(got.lambda == doctest::Approx(lambda).epsilon(1e-12));
  const double expect = (1.0 - lambda) * beta_j + lambda * beta_0;
  CHECK(got.value(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got.value(1, 1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(got.value(0, 1)) <= 1e-14);

  // the scalar chain identity both sides
  const double lhs = got.value.dot(calc.g_prime(phi_j) - calc.g_prime(phi_0));
  CHECK(lhs == doctest::Approx(trh_j - trh_0).epsilon(1e-12));
}

TEST_CASE("lambda lies in the unit interval for random SPD pairs") {
  std::uint64_t state = 2024;
  for (const auto& calc :
       {StressCalculus::regularized(RegParams{0.1, {}}),
        StressCalculus::regularized(RegParams{0.01, 10.0}), StressCalculus::unregularized()}) {
    for (int s = 0; s < 1000; ++s) {
      const SymMat a = random_spd(2, state, 0.02, 5.0);
      const SymMat b = random_spd(2, state, 0.02, 5.0);
      const LambdaHat lh = lambda_hat_full(a, b, calc);
      if (!lh.endpoint_case) {
        CHECK(lh.lambda >= -1e-12);
        CHECK(lh.lambda <= 1.0 + 1e-12);
      }
      // the chain identity that defines the block
      const double lhs = lh.value.dot(calc.g_prime(a) - calc.g_prime(b));
      const double rhs = calc.trace_h_of_gprime(a) - calc.trace_h_of_gprime(b);
      CHECK(std::abs(lhs - rhs) <= tolerances().chain_identity * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("unregularized variant requires SPD input") {
  const StressCalculus calc = StressCalculus::unregularized();
  CHECK_THROWS_AS(lambda_hat_full(SymMat::diag(-1.0, 2.0), SymMat::identity(2), calc),
                  std::domain_error);
}

TEST_CASE("constant fields collapse the element tensor to beta * delta_mp") {
  const SimplicialMesh mesh = build_structured_mesh(3, 2, Rect{0.0, 0.0, 1.3, 0.8});
  const RegParams reg{0.1, {}};
  const StressCalculus calc = StressCalculus::regularized(reg);
  std::uint64_t state = 5;
  const SymMat value = random_spd(2, state, 0.3, 2.5);
  const StressFieldP1 sig = constant_stress_p1(mesh, value);
  const SymMat beta = calc.beta(value);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const LambdaTensor t = lambda_tensor(mesh, k, sig, calc);
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 2; ++p) {
        const SymMat expect = (m == p) ? beta : SymMat(2);
        CHECK((t.block[m][p] - expect).norm() <= 1e-13 * (1.0 + beta.norm()));
      }
  }
}

TEST_CASE("element chain identity on random SPD fields") {
  for (const PropertyResult& r : lambda_chain_suite(8, 25, 77)) {
    INFO(r.name, " worst=", r.worst);
    CHECK(r.pass);
  }
}

TEST_CASE("consistency gap decays with h (smoke)") {
  const SlopeResult s = lambda_consistency_slope({4, 8, 16});
  CHECK(s.gaps[1] < s.gaps[0]);
  CHECK(s.gaps[2] < s.gaps[1]);
  CHECK(s.order >= 0.8);  // full-window order is checked by the acceptance suite
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "obflow/props.hpp"
#include "obflow/tensor.hpp"

using namespace obflow;

namespace {

// independent spectral route for cross-checking matrix_fn
SymMat eigen_matrix_fn(const SymMat& phi, double (*g)(double)) {
  const int d = phi.dim();
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = phi(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < d; ++i) ev(i) = g(ev(i));
  Eigen::MatrixXd r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  SymMat out(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.at(i, j) = 0.5 * (r(i, j) + r(j, i));
  return out;
}

SymMat rotated2(double deg, double l1, double l2) {
  const double th = deg * std::acos(-1.0) / 180.0;
  const double c = std::cos(th), s = std::sin(th);
  SymMat m(2);
  m.at(0, 0) = c * c * l1 + s * s * l2;
  m.at(0, 1) = c * s * (l1 - l2);
  m.at(1, 1) = s * s * l1 + c * c * l2;
  return m;
}

}  // namespace

TEST_CASE("spectral decomposition: identity and diagonal inputs") {
  const SpectralPair p = spectral_decompose(SymMat::identity(2));
  CHECK(p.eigenvalues[0] == 1.0);
  CHECK(p.eigenvalues[1] == 1.0);

  const SpectralPair q = spectral_decompose(SymMat::diag(3.0, -1.0));
  CHECK(q.eigenvalues[0] == -1.0);  // ascending, exact for diagonal input
  CHECK(q.eigenvalues[1] == 3.0);
  CHECK(q.reconstruct().dot(SymMat::diag(3.0, -1.0)) ==
        doctest::Approx(SymMat::diag(3.0, -1.0).dot(SymMat::diag(3.0, -1.0))));
}

TEST_CASE("spectral decomposition recovers a constructed rotation") {
  const SymMat phi = rotated2(30.0, 0.2, 2.0);
  const SpectralPair p = spectral_decompose(phi);
  CHECK(p.eigenvalues[0] == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(p.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-13));
  // O^T O = I and reconstruction
  const Mat o = p.rotation;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 2; ++k) dot += o(k, i) * o(k, j);
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= tolerances().spectral_orthogonality);
    }
  CHECK((p.reconstruct() - phi).norm() <=
        tolerances().spectral_reconstruction * (1.0 + phi.norm()));
}

TEST_CASE("spectral decomposition invariants on random input") {
  std::uint64_t state = 12345;
  for (int dim : {2, 3}) {
    for (int s = 0; s < 500; ++s) {
      const SymMat phi = random_symmetric(dim, state);
      const SpectralPair p = spectral_decompose(phi);
      for (int i = 1; i < dim; ++i) CHECK(p.eigenvalues[i - 1] <= p.eigenvalues[i]);
      Mat ot_o;
      ot_o.dim = dim;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          double dot = 0.0;
          for (int k = 0; k < dim; ++k) dot += p.rotation(k, i) * p.rotation(k, j);
          ot_o.at(i, j) = dot - (i == j ? 1.0 : 0.0);
        }
      CHECK(frobenius(ot_o) <= tolerances().spectral_orthogonality * 3);
      CHECK((p.reconstruct() - phi).norm() <=
            tolerances().spectral_reconstruction * (1.0 + phi.norm()));
    }
  }
}

TEST_CASE("spectral decomposition rejects non-finite input") {
  SymMat bad(2);
  bad.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(spectral_decompose(bad), std::invalid_argument);
}

TEST_CASE("matrix_fn basics and the independent eigensolver oracle") {
  const RegParams half{0.5, {}};
  CHECK(matrix_fn(SymMat::identity(2), [&](double s) { return g_reg(s, half); }).norm() == 0.0);

  const SymMat rt = matrix_fn(SymMat::diag(4.0, 9.0), [](double s) { return std::sqrt(s); });
  CHECK(rt(0, 0) == 2.0);  // exact on diagonal input
  CHECK(rt(1, 1) == 3.0);
  CHECK(rt(0, 1) == 0.0);

  // beta_{0.5} of a rotated spectrum against an independent eigensolve
  const SymMat phi = rotated2(30.0, 0.2, 2.0);
  const SymMat expect = rotated2(30.0, 0.5, 2.0);
  const SymMat got = matrix_fn(phi, [&](double s) { return beta_reg(s, half); });
  CHECK((got - expect).norm() <= 1e-13);
  const SymMat oracle = eigen_matrix_fn(phi, [](double s) { return std::max(s, 0.5); });
  CHECK((got - oracle).norm() <= 1e-13);

  std::uint64_t state = 7;
  for (int dim : {2, 3})
    for (int s = 0; s < 200; ++s) {
      const SymMat m = random_symmetric(dim, state);
      const SymMat a = matrix_fn(m, [](double t) { return std::max(t, 0.1); });
      const SymMat b = eigen_matrix_fn(m, [](double t) { return std::max(t, 0.1); });
      CHECK((a - b).norm() <= 1e-12 * (1.0 + m.norm()));
    }
}

TEST_CASE("matrix_fn names the offending eigenvalue on domain errors") {
  ScalarFunction logfn;
  logfn.name = "G";
  logfn.value = [](double s) { return std::log(s); };
  logfn.domain = [](double s) { return s > 0.0; };
  try {
    matrix_fn(SymMat::diag(1.0, -2.0), logfn);
    FAIL("expected domain_error");
  } catch (const std::domain_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("G") != std::string::npos);
    CHECK(msg.find("-2") != std::string::npos);
  }
}

TEST_CASE("scalar regularized family: branch values and C1 matching") {
  const RegParams half{0.5, {}};
  CHECK(g_reg(1.0, half) == doctest::Approx(0.0));
  CHECK(g_reg(0.25, half) == doctest::Approx(-1.1931471805599453).epsilon(1e-15));
  // C1 matching at s = delta: both branches give ln(1/2)
  CHECK(g_reg(0.5, half) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(g_reg(0.5 + 1e-12, half) == doctest::Approx(g_reg(0.5 - 1e-12, half)).epsilon(1e-9));

  const RegParams cut{0.5, 2.0};
  CHECK(g_reg(3.0, cut) == doctest::Approx(3.0 / 2.0 + std::log(2.0) - 1.0).epsilon(1e-15));
  CHECK(g_reg_prime(0.25, half) == doctest::Approx(1.0 / beta_reg(0.25, half)).epsilon(1e-15));

  CHECK(beta_reg(-1.0, half) == 0.5);
  CHECK(beta_reg(3.0, cut) == 2.0);
  CHECK(beta_reg(1.3, cut) == 1.3);
}

TEST_CASE("H family: values and the chain identity H'(G'(s)) = beta(s)") {
  const RegParams half{0.5, {}};
  CHECK(h_reg(1.0, half) == doctest::Approx(0.0));
  CHECK(h_reg(4.0, half) == doctest::Approx(1.6931471805599454).epsilon(1e-15));
  CHECK(h_reg_prime(g_reg_prime(0.25, half), half) ==
        doctest::Approx(beta_reg(0.25, half)).epsilon(1e-15));

  for (const RegParams& p : {RegParams{0.5, {}}, RegParams{0.1, 2.0}, RegParams{0.01, 10.0}}) {
    for (double s : {-3.0, -0.5, 0.0, 0.05, 0.3, 1.0, 1.9, 2.5, 7.0, 40.0}) {
      CHECK(h_reg_prime(g_reg_prime(s, p), p) ==
            doctest::Approx(beta_reg(s, p)).epsilon(1e-13));
    }
  }
  // unregularized: H = G, H'(G'(s)) = s on the positive axis
  for (double s : {0.2, 1.0, 5.0})
    CHECK(h_exact_prime(g_exact_prime(s)) == doctest::Approx(s).epsilon(1e-14));
  CHECK_THROWS_AS(g_exact(-1.0), std::domain_error);
}

TEST_CASE("entropy trace values") {
  const RegParams half{0.5, {}};
  CHECK(entropy_trace(SymMat::identity(2), half) == 0.0);
  CHECK(entropy_trace(SymMat::diag(2.0, 2.0), half) ==
        doctest::Approx(0.6137056388801094).epsilon(1e-14));
  CHECK(entropy_trace(SymMat::diag(-1.0, 3.0), half) ==
        doctest::Approx(2.5945348918918356).epsilon(1e-14));
  std::uint64_t state = 99;
  for (int s = 0; s < 200; ++s)
    CHECK(entropy_trace(random_symmetric(2, state), half) >= -tolerances().positivity);
}

TEST_CASE("RegParams validation") {
  CHECK_THROWS_AS((RegParams{0.9, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((RegParams{0.0, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((RegParams{0.1, 1.5}).validate(), std::invalid_argument);
  CHECK_NOTHROW((RegParams{0.5, 2.0}).validate());
}

TEST_CASE("spectral calculus property sweep (reduced sample)") {
  for (const PropertyResult& r : lemma21_suite(100, 3)) {
    INFO(r.name, " worst=", r.worst);
    CHECK(r.pass);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "obflow/linsolve.hpp"

using namespace obflow;

namespace {

// dense Gaussian elimination with partial pivoting, the test-side oracle
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

double rng_uniform(std::uint64_t& s) {
  s ^= s >> 12;
  s ^= s << 25;
  s ^= s >> 27;
  return static_cast<double>((s * 0x2545F4914F6CDD1Dull) >> 11) / 9007199254740992.0;
}

}  // namespace

TEST_CASE("identity and small systems") {
  SparseMatrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye.add(i, i, 1.0);
  const std::vector<double> b = {2.0, -1.0, 0.5};
  const std::vector<double> x = solve(eye, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == b[i]);

  SparseMatrix a(2, 2);
  a.add(0, 0, 2.0);
  a.add(0, 1, 1.0);
  a.add(1, 0, 1.0);
  a.add(1, 1, 2.0);
  const std::vector<double> y = solve(a, {3.0, 3.0});
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("duplicate triplets are summed") {
  SparseMatrix a(1, 1);
  a.add(0, 0, 1.5);
  a.add(0, 0, 0.5);
  const std::vector<double> x = solve(a, {4.0});
  CHECK(x[0] == doctest::Approx(2.0));
}

TEST_CASE("random SPD 50x50 against the dense oracle") {
  const int n = 50;
  std::uint64_t state = 1234;
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  SparseMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (rng_uniform(state) < 0.15) {
        const double v = rng_uniform(state) - 0.5;
        dense[i][j] = dense[j][i] = v;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) rowsum += std::abs(dense[i][j]);
    dense[i][i] = rowsum + 1.0 + rng_uniform(state);  // diagonally dominant SPD
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dense[i][j] != 0.0) a.add(i, j, dense[i][j]);
  std::vector<double> b(n);
  for (double& v : b) v = rng_uniform(state) * 2.0 - 1.0;

  const std::vector<double> x = solve(a, b);
  const std::vector<double> y = dense_solve(dense, b);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-11));
}

TEST_CASE("multiple solves against one factorization") {
  SparseMatrix a(2, 2);
  a.add(0, 0, 4.0);
  a.add(1, 1, 2.0);
  LuSolver lu(a);
  CHECK(lu.solve({4.0, 2.0})[0] == doctest::Approx(1.0));
  CHECK(lu.solve({8.0, 6.0})[1] == doctest::Approx(3.0));
  CHECK(a.diagonal()[0] == 4.0);
}

TEST_CASE("singular factorization raises a pivot error") {
  SparseMatrix a(2, 2);
  a.add(0, 0, 1.0);
  a.add(0, 1, 2.0);
  // row 1 empty: structurally singular
  CHECK_THROWS_AS(LuSolver{a}, SolveError);
}

TEST_CASE("index and argument validation") {
  SparseMatrix a(2, 3);
  CHECK_THROWS_AS(a.add(2, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(a.add(0, 0, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(LuSolver{a}, std::invalid_argument);  // not square
}

#include "obflow/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace obflow {

SymMat::SymMat(int dim) : dim_(dim), a_{} {
  if (dim != 2 && dim != 3) throw std::invalid_argument("SymMat: dim must be 2 or 3");
}

SymMat SymMat::identity(int dim) {
  SymMat m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMat SymMat::diag(double a, double b) {
  SymMat m(2);
  m.at(0, 0) = a;
  m.at(1, 1) = b;
  return m;
}

SymMat SymMat::diag(double a, double b, double c) {
  SymMat m(3);
  m.at(0, 0) = a;
  m.at(1, 1) = b;
  m.at(2, 2) = c;
  return m;
}

double SymMat::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMat::norm() const { return std::sqrt(dot(*this)); }

double SymMat::dot(const SymMat& other) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * other(i, j);
  return s;
}

bool SymMat::finite() const {
  for (int c = 0; c < packed_size(); ++c)
    if (!std::isfinite(a_[c])) return false;
  return true;
}

SymMat SymMat::operator+(const SymMat& o) const {
  SymMat r(dim_);
  for (int c = 0; c < packed_size(); ++c) r.a_[c] = a_[c] + o.a_[c];
  return r;
}

SymMat SymMat::operator-(const SymMat& o) const {
  SymMat r(dim_);
  for (int c = 0; c < packed_size(); ++c) r.a_[c] = a_[c] - o.a_[c];
  return r;
}

SymMat SymMat::operator*(double s) const {
  SymMat r(dim_);
  for (int c = 0; c < packed_size(); ++c) r.a_[c] = a_[c] * s;
  return r;
}

SymMat& SymMat::operator+=(const SymMat& o) {
  for (int c = 0; c < packed_size(); ++c) a_[c] += o.a_[c];
  return *this;
}

Mat Mat::identity(int dim) {
  Mat m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat multiply(const Mat& x, const Mat& y) {
  Mat r;
  r.dim = x.dim;
  for (int i = 0; i < r.dim; ++i)
    for (int j = 0; j < r.dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < r.dim; ++k) s += x(i, k) * y(k, j);
      r.at(i, j) = s;
    }
  return r;
}

Mat multiply(const SymMat& x, const SymMat& y) { return multiply(to_mat(x), to_mat(y)); }

double frobenius(const Mat& m) {
  double s = 0.0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

Mat to_mat(const SymMat& m) {
  Mat r;
  r.dim = m.dim();
  for (int i = 0; i < r.dim; ++i)
    for (int j = 0; j < r.dim; ++j) r.at(i, j) = m(i, j);
  return r;
}

SymMat SpectralPair::reconstruct() const {
  SymMat r(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += rotation(k, i) * eigenvalues[k] * rotation(k, j);
      r.at(i, j) = s;
    }
  return r;
}

namespace {

bool exactly_diagonal(const SymMat& m) {
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i + 1; j < m.dim(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

// Ascending sort of eigenvalues, stable, rows of O permuted along.
void sort_pair(SpectralPair& p) {
  std::array<int, 3> ord{0, 1, 2};
  std::stable_sort(ord.begin(), ord.begin() + p.dim,
                   [&](int a, int b) { return p.eigenvalues[a] < p.eigenvalues[b]; });
  SpectralPair q = p;
  for (int r = 0; r < p.dim; ++r) {
    q.eigenvalues[r] = p.eigenvalues[ord[r]];
    for (int c = 0; c < p.dim; ++c) q.rotation.at(r, c) = p.rotation(ord[r], c);
  }
  p = q;
}

SpectralPair decompose2(const SymMat& m) {
  SpectralPair p;
  p.dim = 2;
  p.rotation = Mat::identity(2);
  const double a = m(0, 0), b = m(1, 1), c = m(0, 1);
  const double mean = 0.5 * (a + b);
  const double hd = 0.5 * (a - b);
  const double r = std::hypot(hd, c);
  double l_big, l_small;
  // The root of larger magnitude is safe; the other one comes from the
  // determinant to avoid cancellation when the eigenvalues nearly coincide
  // in magnitude but not in sign.
  if (mean >= 0.0) {
    l_big = mean + r;
    l_small = (l_big != 0.0) ? (a * b - c * c) / l_big : mean - r;
  } else {
    l_big = mean - r;
    l_small = (l_big != 0.0) ? (a * b - c * c) / l_big : mean + r;
  }
  double l1 = std::min(l_big, l_small), l2 = std::max(l_big, l_small);
  p.eigenvalues = {l1, l2, 0.0};
  if (r == 0.0 || c == 0.0) {
    // already diagonal; keep an exact permutation rotation
    if (a <= b) {
      p.eigenvalues = {a, b, 0.0};
    } else {
      p.eigenvalues = {b, a, 0.0};
      p.rotation.at(0, 0) = 0.0;
      p.rotation.at(0, 1) = 1.0;
      p.rotation.at(1, 0) = 1.0;
      p.rotation.at(1, 1) = 0.0;
    }
    return p;
  }
  // Eigenvector for the larger eigenvalue; pick the better-conditioned form.
  double vx, vy;
  if (std::abs(l2 - a) > std::abs(l2 - b)) {
    vx = c;
    vy = l2 - a;
  } else {
    vx = l2 - b;
    vy = c;
  }
  double n = std::hypot(vx, vy);
  vx /= n;
  vy /= n;
  // rows of O are eigenvectors: row 0 for l1, row 1 for l2
  p.rotation.at(1, 0) = vx;
  p.rotation.at(1, 1) = vy;
  p.rotation.at(0, 0) = -vy;
  p.rotation.at(0, 1) = vx;
  return p;
}

SpectralPair decompose3(const SymMat& m) {
  // cyclic Jacobi; A <- J^T A J, V accumulates J so that A0 = V D V^T
  double A[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A[i][j] = m(i, j);
  double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double scale = std::max(1.0, m.norm());
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = std::sqrt(A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2]) *
                 std::sqrt(2.0);
    if (off <= 1e-14 * scale) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (A[p][q] == 0.0) continue;
        const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (int k = 0; k < 3; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = cs * akp - sn * akq;
          A[k][q] = sn * akp + cs * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = cs * apk - sn * aqk;
          A[q][k] = sn * apk + cs * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = cs * vkp - sn * vkq;
          V[k][q] = sn * vkp + cs * vkq;
        }
      }
  }
  // re-orthonormalize the accumulated rotation (modified Gram-Schmidt on columns)
  for (int c = 0; c < 3; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      double d = V[0][c] * V[0][prev] + V[1][c] * V[1][prev] + V[2][c] * V[2][prev];
      for (int k = 0; k < 3; ++k) V[k][c] -= d * V[k][prev];
    }
    double n = std::sqrt(V[0][c] * V[0][c] + V[1][c] * V[1][c] + V[2][c] * V[2][c]);
    for (int k = 0; k < 3; ++k) V[k][c] /= n;
  }
  SpectralPair p;
  p.dim = 3;
  p.rotation.dim = 3;
  p.eigenvalues = {A[0][0], A[1][1], A[2][2]};
  // O = V^T: rows of O are eigenvectors
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p.rotation.at(i, j) = V[j][i];
  sort_pair(p);
  return p;
}

}  // namespace

SpectralPair spectral_decompose(const SymMat& phi) {
  if (!phi.finite()) throw std::invalid_argument("spectral_decompose: non-finite input");
  if (exactly_diagonal(phi)) {
    SpectralPair p;
    p.dim = phi.dim();
    p.rotation = Mat::identity(phi.dim());
    for (int i = 0; i < phi.dim(); ++i) p.eigenvalues[i] = phi(i, i);
    sort_pair(p);
    return p;
  }
  return phi.dim() == 2 ? decompose2(phi) : decompose3(phi);
}

SymMat matrix_fn(const SymMat& phi, const ScalarFunction& g) {
  auto apply = [&](double s) {
    if (g.domain && !g.domain(s)) {
      std::ostringstream os;
      os << "matrix_fn: " << g.name << " undefined at eigenvalue " << s;
      throw std::domain_error(os.str());
    }
    return g.value(s);
  };
  if (exactly_diagonal(phi)) {
    SymMat r(phi.dim());
    for (int i = 0; i < phi.dim(); ++i) r.at(i, i) = apply(phi(i, i));
    return r;
  }
  SpectralPair p = spectral_decompose(phi);
  SpectralPair q = p;
  for (int i = 0; i < p.dim; ++i) q.eigenvalues[i] = apply(p.eigenvalues[i]);
  return q.reconstruct();
}

double min_eigenvalue(const SymMat& phi) {
  return spectral_decompose(phi).eigenvalues[0];
}

SymMat negative_part(const SymMat& phi) {
  return matrix_fn(phi, [](double s) { return std::min(s, 0.0); });
}

void RegParams::validate() const {
  if (!(delta > 0.0) || delta > 0.5)
    throw std::invalid_argument("RegParams: delta must lie in (0, 1/2]");
  if (cutoff && !(*cutoff >= 2.0))
    throw std::invalid_argument("RegParams: cutoff L must satisfy L >= 2");
}

namespace {

// G_delta^(L): log on [delta, L], linear branches outside, both optional.
double g_family(double s, std::optional<double> delta, std::optional<double> cutoff) {
  if (delta && s <= *delta) return s / *delta + std::log(*delta) - 1.0;
  if (cutoff && s >= *cutoff) return s / *cutoff + std::log(*cutoff) - 1.0;
  if (!(s > 0.0)) throw std::domain_error("G: argument must be positive");
  return std::log(s);
}

double beta_family(double s, std::optional<double> delta, std::optional<double> cutoff) {
  double b = s;
  if (delta)
    b = std::max(b, *delta);
  else if (!(s > 0.0))
    throw std::domain_error("beta: argument must be positive");
  if (cutoff) b = std::min(b, *cutoff);
  return b;
}

double g_prime_family(double s, std::optional<double> delta, std::optional<double> cutoff) {
  return 1.0 / beta_family(s, delta, cutoff);
}

// H_delta^(L) = G^{1/delta}_{(1/L)}: regularized below 1/L, cut off above 1/delta.
double h_family(double y, std::optional<double> delta, std::optional<double> cutoff) {
  std::optional<double> lo, hi;
  if (cutoff) lo = 1.0 / *cutoff;
  if (delta) hi = 1.0 / *delta;
  return g_family(y, lo, hi);
}

double h_prime_family(double y, std::optional<double> delta, std::optional<double> cutoff) {
  if (cutoff && y <= 1.0 / *cutoff) return *cutoff;
  if (delta && y >= 1.0 / *delta) return *delta;
  if (!(y > 0.0)) throw std::domain_error("H': argument must be positive");
  return 1.0 / y;
}

}  // namespace

double g_reg(double s, const RegParams& p) { return g_family(s, p.delta, p.cutoff); }
double g_reg_prime(double s, const RegParams& p) { return g_prime_family(s, p.delta, p.cutoff); }
double beta_reg(double s, const RegParams& p) { return beta_family(s, p.delta, p.cutoff); }
double h_reg(double y, const RegParams& p) { return h_family(y, p.delta, p.cutoff); }
double h_reg_prime(double y, const RegParams& p) { return h_prime_family(y, p.delta, p.cutoff); }

double entropy_trace(const SymMat& phi, const RegParams& p) {
  SpectralPair sp = spectral_decompose(phi);
  double t = 0.0;
  for (int i = 0; i < sp.dim; ++i) {
    double l = sp.eigenvalues[i];
    t += l - g_reg(l, p) - 1.0;
  }
  return t;
}

double g_exact(double s, std::optional<double> cutoff) { return g_family(s, {}, cutoff); }
double g_exact_prime(double s, std::optional<double> cutoff) {
  return g_prime_family(s, {}, cutoff);
}
double beta_exact(double s, std::optional<double> cutoff) { return beta_family(s, {}, cutoff); }
double h_exact(double y, std::optional<double> cutoff) { return h_family(y, {}, cutoff); }
double h_exact_prime(double y, std::optional<double> cutoff) {
  return h_prime_family(y, {}, cutoff);
}

StressCalculus StressCalculus::regularized(const RegParams& p) {
  p.validate();
  StressCalculus c;
  c.delta_ = p.delta;
  c.cutoff_ = p.cutoff;
  return c;
}

StressCalculus StressCalculus::unregularized(std::optional<double> cutoff) {
  if (cutoff && !(*cutoff >= 2.0))
    throw std::invalid_argument("StressCalculus: cutoff L must satisfy L >= 2");
  StressCalculus c;
  c.cutoff_ = cutoff;
  return c;
}

double StressCalculus::beta_s(double s) const { return beta_family(s, delta_, cutoff_); }
double StressCalculus::g_s(double s) const { return g_family(s, delta_, cutoff_); }
double StressCalculus::g_prime_s(double s) const { return g_prime_family(s, delta_, cutoff_); }
double StressCalculus::h_s(double y) const { return h_family(y, delta_, cutoff_); }
double StressCalculus::h_prime_s(double y) const { return h_prime_family(y, delta_, cutoff_); }

SymMat StressCalculus::beta(const SymMat& phi) const {
  return matrix_fn(phi, [this](double s) { return beta_s(s); });
}

SymMat StressCalculus::g_prime(const SymMat& phi) const {
  return matrix_fn(phi, [this](double s) { return g_prime_s(s); });
}

double StressCalculus::entropy(const SymMat& phi) const {
  SpectralPair sp = spectral_decompose(phi);
  double t = 0.0;
  for (int i = 0; i < sp.dim; ++i) {
    double l = sp.eigenvalues[i];
    t += l - g_s(l) - 1.0;
  }
  return t;
}

double StressCalculus::dissipation(const SymMat& phi) const {
  SpectralPair sp = spectral_decompose(phi);
  double t = 0.0;
  for (int i = 0; i < sp.dim; ++i) {
    double b = beta_s(sp.eigenvalues[i]);
    t += b + 1.0 / b - 2.0;
  }
  return t;
}

double StressCalculus::trace_h_of_gprime(const SymMat& phi) const {
  SpectralPair sp = spectral_decompose(phi);
  double t = 0.0;
  for (int i = 0; i < sp.dim; ++i) t += h_s(g_prime_s(sp.eigenvalues[i]));
  return t;
}

}  // namespace obflow

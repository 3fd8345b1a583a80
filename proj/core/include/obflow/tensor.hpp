#ifndef OBFLOW_TENSOR_HPP
#define OBFLOW_TENSOR_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>

namespace obflow {

/// Small symmetric d x d matrix (d = 2 or 3), packed upper triangle.
/// Symmetry is structural: there is no storage for a lower triangle,
/// so a SymMat can never drift away from being symmetric.
class SymMat {
public:
  SymMat() : dim_(2), a_{} {}
  explicit SymMat(int dim);
  static SymMat identity(int dim);
  static SymMat diag(double a, double b);
  static SymMat diag(double a, double b, double c);

  int dim() const { return dim_; }
  int packed_size() const { return dim_ == 2 ? 3 : 6; }

  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  double& at(int i, int j) { return a_[idx(i, j)]; }
  double packed(int c) const { return a_[c]; }
  double& packed(int c) { return a_[c]; }

  double trace() const;
  /// Frobenius norm, off-diagonal entries counted twice.
  double norm() const;
  /// Double contraction  this : other.
  double dot(const SymMat& other) const;
  bool finite() const;

  SymMat operator+(const SymMat& o) const;
  SymMat operator-(const SymMat& o) const;
  SymMat operator*(double s) const;
  SymMat& operator+=(const SymMat& o);

private:
  int idx(int i, int j) const {
    if (i > j) { int t = i; i = j; j = t; }
    return i * dim_ - i * (i + 1) / 2 + j;
  }
  int dim_;
  std::array<double, 6> a_;
};

inline SymMat operator*(double s, const SymMat& m) { return m * s; }

/// Plain d x d matrix, used for rotations and matrix products.
struct Mat {
  int dim = 2;
  std::array<double, 9> a{};
  double operator()(int i, int j) const { return a[i * dim + j]; }
  double& at(int i, int j) { return a[i * dim + j]; }
  static Mat identity(int dim);
};

Mat multiply(const Mat& x, const Mat& y);
Mat multiply(const SymMat& x, const SymMat& y);
double frobenius(const Mat& m);
Mat to_mat(const SymMat& m);

/// Diagonal decomposition  phi = O^T D O  with O orthogonal.
/// Eigenvalues are sorted ascending; rows of `rotation` are eigenvectors.
struct SpectralPair {
  int dim = 2;
  Mat rotation;                      // O
  std::array<double, 3> eigenvalues{};  // D, ascending
  SymMat reconstruct() const;           // O^T D O
};

/// Decompose a symmetric matrix. 2x2 uses a guarded closed form,
/// 3x3 cyclic Jacobi. Throws std::invalid_argument on non-finite input.
SpectralPair spectral_decompose(const SymMat& phi);

/// Scalar function with an optional domain predicate, for error reporting
/// when a matrix function is evaluated outside the domain of g.
struct ScalarFunction {
  std::string name = "g";
  std::function<double(double)> value;
  std::function<bool(double)> domain;  // empty = all of R
};

/// g(phi) = O^T g(D) O. Exactly diagonal inputs (including c*I) are mapped
/// entrywise, so matrix_fn(c*I, g) == g(c)*I with no roundoff.
/// Throws std::domain_error naming the offending eigenvalue if g is
/// undefined there.
SymMat matrix_fn(const SymMat& phi, const ScalarFunction& g);

template <class F>
SymMat matrix_fn(const SymMat& phi, F g) {
  ScalarFunction fn;
  fn.value = std::move(g);
  return matrix_fn(phi, fn);
}

double min_eigenvalue(const SymMat& phi);
SymMat negative_part(const SymMat& phi);  // spectral s -> min(s, 0)

/// Regularization knobs: delta in (0, 1/2], optional cut-off L >= 2.
/// The cut-off being absent is an explicit state, never L = infinity.
struct RegParams {
  double delta = 0.5;
  std::optional<double> cutoff{};
  void validate() const;  // throws std::invalid_argument
};

// Scalar regularized-logarithm family. All functions are total on R.
double g_reg(double s, const RegParams& p);        // G_delta^(L)
double g_reg_prime(double s, const RegParams& p);  // (G_delta^(L))' = 1/beta
double beta_reg(double s, const RegParams& p);     // clamp(s, delta, L)
double h_reg(double y, const RegParams& p);        // H_delta^(L)
double h_reg_prime(double y, const RegParams& p);

/// tr(phi - G_delta^(L)(phi) - I), always >= 0.
double entropy_trace(const SymMat& phi, const RegParams& p);

// Unregularized counterparts with an optional cut-off; the domain is the
// positive half-line (SPD matrices). Out-of-domain arguments throw
// std::domain_error.
double g_exact(double s, std::optional<double> cutoff = {});
double g_exact_prime(double s, std::optional<double> cutoff = {});
double beta_exact(double s, std::optional<double> cutoff = {});
double h_exact(double y, std::optional<double> cutoff = {});
double h_exact_prime(double y, std::optional<double> cutoff = {});

/// One bundle of the scalar calculus a scheme needs, either the
/// delta-regularized family or the unregularized one (Remark-5.1 style,
/// which requires SPD arguments).
class StressCalculus {
public:
  static StressCalculus regularized(const RegParams& p);
  static StressCalculus unregularized(std::optional<double> cutoff = {});

  bool is_regularized() const { return delta_.has_value(); }
  std::optional<double> delta() const { return delta_; }
  std::optional<double> cutoff() const { return cutoff_; }

  double beta_s(double s) const;
  double g_s(double s) const;
  double g_prime_s(double s) const;
  double h_s(double y) const;
  double h_prime_s(double y) const;

  SymMat beta(const SymMat& phi) const;
  SymMat g_prime(const SymMat& phi) const;
  /// tr(phi - G(phi) - I)
  double entropy(const SymMat& phi) const;
  /// tr(beta(phi) + beta(phi)^{-1} - 2 I)
  double dissipation(const SymMat& phi) const;
  /// tr(H(G'(phi)))
  double trace_h_of_gprime(const SymMat& phi) const;

private:
  std::optional<double> delta_;
  std::optional<double> cutoff_;
};

}  // namespace obflow

#endif

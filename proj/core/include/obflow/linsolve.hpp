#ifndef OBFLOW_LINSOLVE_HPP
#define OBFLOW_LINSOLVE_HPP

#include <memory>
#include <stdexcept>
#include <vector>

namespace obflow {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

class SolveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Coordinate-format assembly container, compiled to compressed columns on
/// first use. Duplicate (row, col) entries are summed during compilation.
class SparseMatrix {
public:
  SparseMatrix(int rows, int cols);
  ~SparseMatrix();
  SparseMatrix(SparseMatrix&&) noexcept;
  SparseMatrix& operator=(SparseMatrix&&) noexcept;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  void add(int row, int col, double value);
  void add(const std::vector<Triplet>& triplets);
  /// Compile triplets to compressed columns. Called implicitly by solvers.
  void compile();
  bool compiled() const;

  std::vector<double> multiply(const std::vector<double>& x) const;
  /// Main diagonal (after compilation); zeros where unset.
  std::vector<double> diagonal() const;

private:
  friend class LuSolver;
  int rows_, cols_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sparse LU with partial pivoting and natural (identity) column order,
/// so factorizations are bit-reproducible. Immutable after construction;
/// concurrent solves against one factorization are allowed.
class LuSolver {
public:
  explicit LuSolver(SparseMatrix& a);
  ~LuSolver();

  /// Solves A x = b and verifies ||Ax - b||_inf <= 1e-11 (1 + ||b||_inf).
  /// Throws SolveError on a singular factorization (naming the pivot) or a
  /// failed residual check.
  std::vector<double> solve(const std::vector<double>& b) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
std::vector<double> solve(SparseMatrix& a, const std::vector<double>& b);

}  // namespace obflow

#endif

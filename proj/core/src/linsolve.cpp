#include "obflow/linsolve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace obflow {

struct SparseMatrix::Impl {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::SparseMatrix<double> compiled;
  bool is_compiled = false;
};

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), impl_(std::make_unique<Impl>()) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
}

SparseMatrix::~SparseMatrix() = default;
SparseMatrix::SparseMatrix(SparseMatrix&&) noexcept = default;
SparseMatrix& SparseMatrix::operator=(SparseMatrix&&) noexcept = default;

void SparseMatrix::add(int row, int col, double value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw std::invalid_argument("SparseMatrix::add: index out of range");
  if (!std::isfinite(value)) throw std::invalid_argument("SparseMatrix::add: non-finite value");
  if (impl_->is_compiled) throw std::logic_error("SparseMatrix::add after compile()");
  impl_->triplets.emplace_back(row, col, value);
}

void SparseMatrix::add(const std::vector<Triplet>& triplets) {
  for (const Triplet& t : triplets) add(t.row, t.col, t.value);
}

void SparseMatrix::compile() {
  if (impl_->is_compiled) return;
  impl_->compiled.resize(rows_, cols_);
  impl_->compiled.setFromTriplets(impl_->triplets.begin(), impl_->triplets.end());
  impl_->compiled.makeCompressed();
  impl_->triplets.clear();
  impl_->is_compiled = true;
}

bool SparseMatrix::compiled() const { return impl_->is_compiled; }

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (!impl_->is_compiled) throw std::logic_error("SparseMatrix::multiply before compile()");
  if (static_cast<int>(x.size()) != cols_)
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), cols_);
  Eigen::VectorXd y = impl_->compiled * xv;
  return std::vector<double>(y.data(), y.data() + y.size());
}

std::vector<double> SparseMatrix::diagonal() const {
  if (!impl_->is_compiled) throw std::logic_error("SparseMatrix::diagonal before compile()");
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = impl_->compiled.coeff(i, i);
  return d;
}

struct LuSolver::Impl {
  Eigen::SparseMatrix<double> a;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
};

LuSolver::LuSolver(SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LuSolver: matrix must be square");
  a.compile();
  impl_->a = a.impl_->compiled;
  impl_->lu.analyzePattern(impl_->a);
  impl_->lu.factorize(impl_->a);
  if (impl_->lu.info() != Eigen::Success)
    throw SolveError("LuSolver: singular factorization (" + impl_->lu.lastErrorMessage() + ")");
}

LuSolver::~LuSolver() = default;

std::vector<double> LuSolver::solve(const std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != impl_->a.rows())
    throw std::invalid_argument("LuSolver::solve: size mismatch");
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  Eigen::VectorXd x = impl_->lu.solve(bv);
  if (impl_->lu.info() != Eigen::Success) throw SolveError("LuSolver: back substitution failed");
  const double resid = (impl_->a * x - bv).cwiseAbs().maxCoeff();
  const double bnorm = bv.cwiseAbs().maxCoeff();
  if (!(resid <= 1e-11 * (1.0 + bnorm)))
    throw SolveError("LuSolver: residual check failed, ||Ax-b||_inf = " + std::to_string(resid));
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> solve(SparseMatrix& a, const std::vector<double>& b) {
  return LuSolver(a).solve(b);
}

}  // namespace obflow

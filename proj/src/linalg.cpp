#include "edmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "edmp/errors.hpp"

namespace edmp {

void TolerancePolicy::validate() const {
  if (!(rank_rel > 0.0) || !(psd_abs_scale > 0.0) || !(recon_rel > 0.0) || !(parallel_rel > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "tolerances must be strictly positive");
  }
}

TolerancePolicy TolerancePolicy::from_env() {
  TolerancePolicy tol;
  if (const char* env = std::getenv("EDMP_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0') {
      throw Error(ErrorKind::InvalidInput, std::string("EDMP_TOL is not a number: ") + env);
    }
    tol.rank_rel = value;
  }
  tol.validate();
  return tol;
}

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorKind::InvalidInput, "symmetric matrix must be square and nonempty");
  }
  a_ = (a + a.transpose()) * 0.5;
}

EigDecomp sym_eig(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  EigDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double max_abs_eigenvalue(const EigDecomp& eig) {
  return eig.values.size() == 0 ? 0.0 : eig.values.cwiseAbs().maxCoeff();
}

double min_eigenvalue(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

namespace {

double rank_threshold(const EigDecomp& eig, const TolerancePolicy& tol) {
  return tol.rank_rel * max_abs_eigenvalue(eig);
}

}  // namespace

SymMatrix pinv(const SymMatrix& a, const TolerancePolicy& tol) {
  const EigDecomp eig = sym_eig(a);
  const double cut = rank_threshold(eig, tol);
  Vector inv = Vector::Zero(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i)) > cut) inv(i) = 1.0 / eig.values(i);
  }
  return SymMatrix(eig.vectors * inv.asDiagonal() * eig.vectors.transpose());
}

int rank_of(const SymMatrix& a, const TolerancePolicy& tol) {
  const EigDecomp eig = sym_eig(a);
  const double cut = rank_threshold(eig, tol);
  int rank = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values(i)) > cut) ++rank;
  }
  return rank;
}

bool is_psd(const SymMatrix& a, const TolerancePolicy& tol) {
  const EigDecomp eig = sym_eig(a);
  const double scale = std::max(1.0, max_abs_eigenvalue(eig));
  return eig.values(eig.values.size() - 1) >= -tol.psd_abs_scale * scale;
}

Matrix nullspace_basis(const Matrix& a, const TolerancePolicy& tol) {
  const Eigen::Index cols = a.cols();
  if (cols == 0) return Matrix(0, 0);
  if (a.rows() == 0) return Matrix::Identity(cols, cols);
  // Full V is needed for the complement; pad short matrices with zero rows.
  Matrix padded = a;
  if (a.rows() < cols) {
    padded = Matrix::Zero(cols, cols);
    padded.topRows(a.rows()) = a;
  }
  Eigen::JacobiSVD<Matrix> svd(padded, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cut = tol.rank_rel * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

bool are_parallel(const Vector& u, const Vector& v, double rel_tol) {
  Matrix pair(u.size(), 2);
  pair.col(0) = u;
  pair.col(1) = v;
  if (u.size() < 2) return true;  // two scalars always span at most one dimension
  Eigen::JacobiSVD<Matrix> svd(pair);
  const Vector& sv = svd.singularValues();
  return sv(1) <= rel_tol * sv(0);
}

ExtremeEigs rank2_sym_eigs(const Vector& a, const Vector& b, const TolerancePolicy& tol) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidInput, "vector lengths differ");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0 || are_parallel(a, b, tol.parallel_rel)) {
    throw Error(ErrorKind::ParallelVectors, "rank-two formula needs nonzero, nonparallel vectors");
  }
  const double ab = a.dot(b);
  return {ab + na * nb, ab - na * nb};
}

}  // namespace edmp

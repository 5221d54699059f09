#pragma once

// Dense symmetric kernel. Every rank, parallelism and PSD decision in the
// library goes through a TolerancePolicy; thresholds are relative to the
// largest eigenvalue (or singular value) magnitude of the operand.

#include <Eigen/Dense>

namespace edmp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TolerancePolicy {
  double rank_rel = 1e-10;
  double psd_abs_scale = 1e-9;
  double recon_rel = 1e-8;
  double parallel_rel = 1e-8;

  /// Throws InvalidInput unless every field is strictly positive.
  void validate() const;

  /// Defaults, with rank_rel taken from EDMP_TOL when that is set.
  static TolerancePolicy from_env();
};

/// Square, exactly symmetric matrix. Construction symmetrizes by averaging.
class SymMatrix {
 public:
  SymMatrix() : a_(Matrix::Zero(1, 1)) {}
  explicit SymMatrix(const Matrix& a);

  Eigen::Index order() const { return a_.rows(); }
  const Matrix& matrix() const { return a_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }

 private:
  Matrix a_;
};

struct EigDecomp {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, matching values
};

EigDecomp sym_eig(const SymMatrix& a);

double max_abs_eigenvalue(const EigDecomp& eig);
double min_eigenvalue(const SymMatrix& a);

SymMatrix pinv(const SymMatrix& a, const TolerancePolicy& tol = {});
int rank_of(const SymMatrix& a, const TolerancePolicy& tol = {});
bool is_psd(const SymMatrix& a, const TolerancePolicy& tol = {});

/// Orthonormal columns spanning null(a); a may be rectangular.
Matrix nullspace_basis(const Matrix& a, const TolerancePolicy& tol = {});

/// Ratio test on the two singular values of [u v].
bool are_parallel(const Vector& u, const Vector& v, double rel_tol);

struct ExtremeEigs {
  double largest;
  double smallest;
};

/// Extreme eigenvalues of a b^T + b a^T in closed form. Throws
/// ParallelVectors when a and b are parallel (or either is zero).
ExtremeEigs rank2_sym_eigs(const Vector& a, const Vector& b, const TolerancePolicy& tol = {});

}  // namespace edmp

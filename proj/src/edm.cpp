#include "edmp/edm.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <string>

#include "edmp/errors.hpp"

namespace edmp {

EntryIndex EntryIndex::zero_based(int k, int l, int n) {
  if (k < 0 || l < 0 || k >= n || l >= n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "entry (" + std::to_string(k + 1) + "," + std::to_string(l + 1) +
                    ") outside a matrix of order " + std::to_string(n));
  }
  if (k == l) throw Error(ErrorKind::InvalidInput, "diagonal entries cannot be perturbed");
  if (k > l) std::swap(k, l);
  return EntryIndex{k, l};
}

DistanceMatrix DistanceMatrix::from_matrix(const Matrix& d) {
  if (d.rows() != d.cols()) throw Error(ErrorKind::InvalidInput, "distance matrix must be square");
  if (d.rows() < 3) throw Error(ErrorKind::InvalidInput, "distance matrix needs n >= 3");
  if (!d.allFinite()) throw Error(ErrorKind::InvalidInput, "distance matrix has non-finite entries");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  const double slack = 1e-12 * scale;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (std::abs(d(i, i)) > slack) throw Error(ErrorKind::NotAnEdm, "diagonal must be zero");
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (std::abs(d(i, j) - d(j, i)) > slack) throw Error(ErrorKind::NotAnEdm, "matrix is not symmetric");
      if (d(i, j) < 0.0 || d(j, i) < 0.0) throw Error(ErrorKind::NotAnEdm, "negative squared distance");
    }
  }
  Matrix sym = (d + d.transpose()) * 0.5;
  sym.diagonal().setZero();
  return DistanceMatrix(std::move(sym));
}

DistanceMatrix DistanceMatrix::scaled(double factor) const {
  if (!(factor >= 0.0)) throw Error(ErrorKind::InvalidInput, "scale factor must be nonnegative");
  return DistanceMatrix(d_ * factor);
}

Matrix DistanceMatrix::perturbed(EntryIndex entry, double t) const {
  Matrix out = d_;
  out(entry.k, entry.l) += t;
  out(entry.l, entry.k) += t;
  return out;
}

SymMatrix centered_gram(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  return SymMatrix(-0.5 * j * a * j);
}

bool is_edm(const Matrix& a, const TolerancePolicy& tol) { return is_psd(centered_gram(a), tol); }

bool is_edm(const DistanceMatrix& d, const TolerancePolicy& tol) { return is_edm(d.matrix(), tol); }

Vector w_vector(const Matrix& a, const TolerancePolicy& tol) {
  return pinv(SymMatrix(a), tol).matrix() * Vector::Ones(a.rows());
}

bool unit_spherical_by_w(const Vector& w) {
  return std::abs(2.0 * w.sum() - 1.0) <= 1e-8 * static_cast<double>(w.size());
}

Vector EdmProfile::gale_row(int i) const {
  if (!z) return Vector(0);
  return z->row(i).transpose();
}

Vector EdmProfile::gale_tilde_row(int i) const {
  const double wn = w.norm();
  const Eigen::Index extra = z ? z->cols() : 0;
  Vector row(1 + extra);
  row(0) = wn > 0.0 ? w(i) / wn : 0.0;
  if (z) row.tail(extra) = z->row(i).transpose();
  return row;
}

bool EdmProfile::w_vanishes(int i) const {
  return std::abs(w(i)) <= tol.parallel_rel * std::max(w.norm(), 1e-300);
}

bool EdmProfile::gale_row_vanishes(int i) const {
  return !z || z->row(i).norm() <= tol.parallel_rel;
}

namespace {

// Fix each column's sign so its first significant entry is positive.
void normalize_column_signs(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double cut = 1e-12 * m.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, c)) > cut) {
        if (m(i, c) < 0.0) m.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

EdmProfile profile(const DistanceMatrix& d, const TolerancePolicy& tol) {
  tol.validate();
  const int n = d.n();
  const Vector e = Vector::Ones(n);

  EdmProfile out{.d = d, .tol = tol};
  out.b = centered_gram(d.matrix());
  const EigDecomp eig = sym_eig(out.b);
  const double scale = std::max(1.0, max_abs_eigenvalue(eig));
  if (eig.values(n - 1) < -tol.psd_abs_scale * scale) {
    throw Error(ErrorKind::NotAnEdm, "-JDJ/2 is not positive semidefinite");
  }
  const double cut = tol.rank_rel * max_abs_eigenvalue(eig);
  int r = 0;
  while (r < n && eig.values(r) > cut) ++r;
  out.r = r;

  out.p = eig.vectors.leftCols(r) * eig.values.head(r).cwiseSqrt().asDiagonal();
  normalize_column_signs(out.p);

  out.b_dag = pinv(out.b, tol);
  out.d_dag = pinv(SymMatrix(d.matrix()), tol);
  out.w = out.d_dag.matrix() * e;

  // null([P^T; e^T]) == null([V_r^T; e^T/sqrt(n)]); the latter has all
  // nonzero singular values equal to one.
  if (r <= n - 2) {
    Matrix stacked(r + 1, n);
    stacked.topRows(r) = eig.vectors.leftCols(r).transpose();
    stacked.row(r) = e.transpose() / std::sqrt(static_cast<double>(n));
    Matrix z = nullspace_basis(stacked, tol);
    normalize_column_signs(z);
    out.z = std::move(z);
  }
  const Eigen::Index gale_cols = out.z ? out.z->cols() : 0;
  out.z_tilde.resize(n, 1 + gale_cols);
  out.z_tilde.col(0) = out.w;
  if (out.z) out.z_tilde.rightCols(gale_cols) = *out.z;

  const double ew = out.w.sum();
  out.spherical = ew > tol.recon_rel * std::sqrt(static_cast<double>(n)) * out.w.norm();
  if (out.spherical) {
    out.unit_spherical = unit_spherical_by_w(out.w);
    out.radius = std::sqrt(1.0 / (2.0 * ew));
    const Vector diag_b = out.b.matrix().diagonal();
    const Vector rhs = 0.5 * (diag_b - Vector::Constant(n, diag_b.mean()));
    if (r > 0) {
      out.center = (out.p.transpose() * out.p).ldlt().solve(out.p.transpose() * rhs);
    } else {
      out.center = Vector(0);
    }
    const Vector de = d.matrix() * e;
    const double mean = de.mean();
    out.regular = (de - Vector::Constant(n, mean)).norm() <= tol.recon_rel * std::max(de.norm(), 1e-300);
  }
  return out;
}

namespace {

struct UnitData {
  Matrix d_dag;
  Vector w;
};

UnitData require_unit_spherical(const DistanceMatrix& d, const TolerancePolicy& tol) {
  if (!is_edm(d, tol)) throw Error(ErrorKind::NotAnEdm, "input is not an EDM");
  UnitData out;
  out.d_dag = pinv(SymMatrix(d.matrix()), tol).matrix();
  out.w = out.d_dag * Vector::Ones(d.n());
  if (!unit_spherical_by_w(out.w)) {
    throw Error(ErrorKind::NotUnitSpherical, "2 e^T w = " + std::to_string(2.0 * out.w.sum()));
  }
  return out;
}

}  // namespace

SymMatrix gram(const DistanceMatrix& d, GramChoice choice, const TolerancePolicy& tol) {
  if (choice == GramChoice::Centroid) return centered_gram(d.matrix());
  require_unit_spherical(d, tol);
  const Eigen::Index n = d.n();
  return SymMatrix(Matrix::Ones(n, n) - 0.5 * d.matrix());
}

SymMatrix bdag_identity(const DistanceMatrix& d, const TolerancePolicy& tol) {
  const UnitData u = require_unit_spherical(d, tol);
  return SymMatrix(-2.0 * u.d_dag + 4.0 * u.w * u.w.transpose());
}

SymMatrix bprime_dag_identity(const DistanceMatrix& d, const TolerancePolicy& tol) {
  const UnitData u = require_unit_spherical(d, tol);
  const double wtw = u.w.squaredNorm();
  const Vector dw = u.d_dag * u.w;
  const double wdw = u.w.dot(dw);
  const Matrix wwt = u.w * u.w.transpose();
  const Matrix bracket = dw * u.w.transpose() + u.w * dw.transpose() - (wdw / wtw) * wwt;
  return SymMatrix(-2.0 * u.d_dag + (2.0 / wtw) * bracket);
}

SymMatrix cm_dag_block(const DistanceMatrix& d, const TolerancePolicy& tol) {
  const UnitData u = require_unit_spherical(d, tol);
  const Eigen::Index n = d.n();
  const Matrix b_dag = -2.0 * u.d_dag + 4.0 * u.w * u.w.transpose();
  Matrix out(n + 1, n + 1);
  out(0, 0) = -2.0;
  out.block(0, 1, 1, n) = 2.0 * u.w.transpose();
  out.block(1, 0, n, 1) = 2.0 * u.w;
  out.block(1, 1, n, n) = -0.5 * b_dag;
  return SymMatrix(out);
}

}  // namespace edmp

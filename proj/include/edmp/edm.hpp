#pragma once

#include <optional>

#include "edmp/linalg.hpp"

namespace edmp {

/// Off-diagonal position of a distance matrix, stored 0-based with k < l.
struct EntryIndex {
  int k = 0;
  int l = 1;

  /// Swaps k > l; rejects k == l and indices outside [0, n).
  static EntryIndex zero_based(int k, int l, int n);
  static EntryIndex one_based(int k, int l, int n) { return zero_based(k - 1, l - 1, n); }

  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

/// Symmetric hollow matrix of squared distances, n >= 3.
class DistanceMatrix {
 public:
  /// Validates shape, symmetry (to 1e-12 relative), zero diagonal and
  /// nonnegativity, then stores an exactly symmetric hollow copy.
  static DistanceMatrix from_matrix(const Matrix& d);

  int n() const { return static_cast<int>(d_.rows()); }
  const Matrix& matrix() const { return d_; }
  double operator()(int i, int j) const { return d_(i, j); }

  DistanceMatrix scaled(double factor) const;

  /// D + t E^{kl}. The result need not be a distance matrix.
  Matrix perturbed(EntryIndex entry, double t) const;

 private:
  explicit DistanceMatrix(Matrix d) : d_(std::move(d)) {}
  Matrix d_;
};

/// -J A J / 2 with J = I - ee^T/n, for any square A.
SymMatrix centered_gram(const Matrix& a);

/// True iff the hollow symmetric matrix a is negative semidefinite on e-perp.
bool is_edm(const Matrix& a, const TolerancePolicy& tol = {});
bool is_edm(const DistanceMatrix& d, const TolerancePolicy& tol = {});

/// w = A^dag e for a square symmetric A.
Vector w_vector(const Matrix& a, const TolerancePolicy& tol = {});

/// |2 e^T w - 1| <= 1e-8 n.
bool unit_spherical_by_w(const Vector& w);

struct EdmProfile {
  DistanceMatrix d;
  TolerancePolicy tol;
  int r = 0;
  SymMatrix b;
  SymMatrix b_dag;
  SymMatrix d_dag;
  Matrix p;                 // n x r, P^T e = 0, B = P P^T
  Vector w;                 // D^dag e
  std::optional<Matrix> z;  // n x (n-r-1) orthonormal Gale basis; absent when r = n-1
  Matrix z_tilde;           // [w Z], or w alone when r = n-1
  bool spherical = false;
  bool unit_spherical = false;
  std::optional<double> radius;
  std::optional<Vector> center;
  bool regular = false;

  int n() const { return d.n(); }
  double e_dot_w() const { return w.sum(); }

  /// Row i of the Gale matrix (empty vector when r = n-1).
  Vector gale_row(int i) const;
  /// Row i of [w/|w|, Z]; normalizing w keeps the scale of both blocks
  /// comparable without changing any parallelism relation between rows.
  Vector gale_tilde_row(int i) const;
  /// |w_i| small relative to |w|.
  bool w_vanishes(int i) const;
  bool gale_row_vanishes(int i) const;
};

/// Throws NotAnEdm unless is_edm(d).
EdmProfile profile(const DistanceMatrix& d, const TolerancePolicy& tol = {});

enum class GramChoice { Centroid, WVector };

/// Centroid: -JDJ/2. WVector: E - D/2, which requires a unit spherical D.
SymMatrix gram(const DistanceMatrix& d, GramChoice choice, const TolerancePolicy& tol = {});

/// B^dag via -2 D^dag + 4 w w^T (unit spherical D only).
SymMatrix bdag_identity(const DistanceMatrix& d, const TolerancePolicy& tol = {});

/// B'^dag for B' = E - D/2 via D^dag and w (unit spherical D only).
SymMatrix bprime_dag_identity(const DistanceMatrix& d, const TolerancePolicy& tol = {});

/// Closed form of the pseudoinverse of the bordered matrix [[0, e^T], [e, D]]:
/// [[-2, 2w^T], [2w, -B^dag/2]] (unit spherical D only).
SymMatrix cm_dag_block(const DistanceMatrix& d, const TolerancePolicy& tol = {});

}  // namespace edmp

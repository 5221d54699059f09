#pragma once

#include <optional>

#include "edmp/perturbation.hpp"

namespace edmp {

/// D bordered by a ones row/column with a zero corner, (n+1) x (n+1).
/// Entry (k, l) of the source sits at (k+1, l+1) here.
struct CayleyMengerView {
  SymMatrix d_tilde;
  Vector w_tilde;                     // pinv(d_tilde) * ones
  std::optional<Matrix> gale_tilde;   // set when the source is unit spherical
  DistanceMatrix source;
  TolerancePolicy tol;
};

/// Bordered matrix of an arbitrary square symmetric matrix.
Matrix bordered(const Matrix& d);

CayleyMengerView cm_build(const DistanceMatrix& d, const TolerancePolicy& tol = {});

bool cm_is_edm(const CayleyMengerView& view);

/// 1 - e~^T w~ / 2. Throws NotAnEdm unless cm_is_edm(view).
double cm_radius_sq(const CayleyMengerView& view);

/// Embedding dimension of the bordered matrix as an EDM. Throws
/// NotUnitSpherical unless the source is unit spherical.
int cm_embedding_dim(const CayleyMengerView& view);

/// [-1/2; w] when r = n-1, [[-1/2, 0], [w, Z]] otherwise; checked against
/// null([B~; e~^T]). Throws NotUnitSpherical / NumericalFailure.
Matrix cm_gale(const CayleyMengerView& view);

/// e~^T w~(t) for the bordered matrix of D + tE^{kl}, from the closed form
/// in theta_lower, theta_upper, theta_c. Requires the RadiusFormula case
/// (PreconditionViolated otherwise) and throws PoleAt near a pole.
double cm_w_inner(const EdmProfile& profile, EntryIndex entry, double t);

/// Same quantity by direct pseudoinversion of the perturbed bordered matrix.
double cm_w_inner_direct(const DistanceMatrix& d, EntryIndex entry, double t, const TolerancePolicy& tol = {});

/// Coefficients (1, b1, b2) of g(t) = det(I_2 - (t/2) M), where M is the
/// (k, l) block of E^{kl} B^dag and B^dag = -2 * (lower block of pinv(D~)).
/// Reproduces g from the bordered-matrix route only.
struct GPolynomial {
  double c0;
  double c1;
  double c2;
};
GPolynomial cm_g_polynomial(const CayleyMengerView& view, EntryIndex entry);

}  // namespace edmp

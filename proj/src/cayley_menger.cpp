#include "edmp/cayley_menger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edmp/errors.hpp"

namespace edmp {

Matrix bordered(const Matrix& d) {
  const Eigen::Index n = d.rows();
  Matrix out(n + 1, n + 1);
  out(0, 0) = 0.0;
  out.block(0, 1, 1, n).setOnes();
  out.block(1, 0, n, 1).setOnes();
  out.block(1, 1, n, n) = d;
  return out;
}

CayleyMengerView cm_build(const DistanceMatrix& d, const TolerancePolicy& tol) {
  SymMatrix dt(bordered(d.matrix()));
  Vector wt = pinv(dt, tol).matrix() * Vector::Ones(d.n() + 1);
  CayleyMengerView view{std::move(dt), std::move(wt), std::nullopt, d, tol};
  if (is_edm(d, tol)) {
    const EdmProfile prof = profile(d, tol);
    if (prof.unit_spherical) {
      const int n = d.n();
      const Eigen::Index gale_cols = prof.z ? prof.z->cols() : 0;
      Matrix g = Matrix::Zero(n + 1, 1 + gale_cols);
      g(0, 0) = -0.5;
      g.block(1, 0, n, 1) = prof.w;
      if (prof.z) g.block(1, 1, n, gale_cols) = *prof.z;
      view.gale_tilde = std::move(g);
    }
  }
  return view;
}

bool cm_is_edm(const CayleyMengerView& view) { return is_edm(view.d_tilde.matrix(), view.tol); }

double cm_radius_sq(const CayleyMengerView& view) {
  if (!cm_is_edm(view)) throw Error(ErrorKind::NotAnEdm, "bordered matrix is not an EDM (radius > 1 or not spherical)");
  return 1.0 - 0.5 * view.w_tilde.sum();
}

int cm_embedding_dim(const CayleyMengerView& view) {
  if (!view.gale_tilde) throw Error(ErrorKind::NotUnitSpherical, "source is not unit spherical");
  return rank_of(centered_gram(view.d_tilde.matrix()), view.tol);
}

Matrix cm_gale(const CayleyMengerView& view) {
  if (!view.gale_tilde) throw Error(ErrorKind::NotUnitSpherical, "source is not unit spherical");
  const Matrix& g = *view.gale_tilde;
  const Matrix bt = centered_gram(view.d_tilde.matrix()).matrix();
  const double scale = std::max(1.0, bt.norm());
  const double resid_b = (bt * g).norm();
  const double resid_e = std::abs((Vector::Ones(g.rows()).transpose() * g).norm());
  const int dim = rank_of(SymMatrix(bt), view.tol);
  if (resid_b > 1e-8 * scale * g.norm() || resid_e > 1e-8 * g.norm() || g.cols() != view.source.n() - dim) {
    throw Error(ErrorKind::NumericalFailure, "bordered Gale matrix fails the null-space check");
  }
  return g;
}

double cm_w_inner(const EdmProfile& profile, EntryIndex entry, double t) {
  const RadiusCoefficients rc = radius_coefficients(profile, entry);
  const double lead = 8.0 * rc.w_l * rc.w_l * rc.c * t / (rc.theta_c * rc.beta2);
  auto check_pole = [&](double pole) {
    if (std::abs(t - pole) <= 1e-9 * std::max(1.0, std::abs(pole))) {
      throw Error(ErrorKind::PoleAt, "closed form has a pole at t = " + std::to_string(pole));
    }
  };
  if (rc.coincident_root) {
    // theta_c == theta_lower when c > 0, theta_c == theta_upper when c < 0.
    const double other = rc.c > 0.0 ? rc.theta_upper : rc.theta_lower;
    check_pole(other);
    return lead / (t - other);
  }
  check_pole(rc.theta_lower);
  check_pole(rc.theta_upper);
  return lead * (t - rc.theta_c) / ((t - rc.theta_lower) * (t - rc.theta_upper));
}

double cm_w_inner_direct(const DistanceMatrix& d, EntryIndex entry, double t, const TolerancePolicy& tol) {
  const Matrix dt = bordered(d.perturbed(entry, t));
  return (pinv(SymMatrix(dt), tol).matrix() * Vector::Ones(dt.rows())).sum();
}

GPolynomial cm_g_polynomial(const CayleyMengerView& view, EntryIndex entry) {
  const Matrix inv = pinv(view.d_tilde, view.tol).matrix();
  const int k = entry.k + 1;
  const int l = entry.l + 1;
  const double bkk = -2.0 * inv(k, k);
  const double bll = -2.0 * inv(l, l);
  const double bkl = -2.0 * inv(k, l);
  // M = [[B_lk, B_ll], [B_kk, B_kl]]; det(I - s M) = 1 - s tr(M) + s^2 det(M), s = t/2.
  const double tr = 2.0 * bkl;
  const double det = bkl * bkl - bkk * bll;
  return {1.0, -0.5 * tr, 0.25 * det};
}

}  // namespace edmp

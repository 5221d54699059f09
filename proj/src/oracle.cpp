#include "edmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "edmp/errors.hpp"
#include "edmp/yielding.hpp"

namespace edmp {

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::Generic: return "generic";
    case Structure::ParallelGalePair: return "parallel-gale";
    case Structure::ZeroGalePair: return "zero-gale";
    case Structure::MirrorPair: return "mirror";
  }
  return "unknown";
}

std::optional<Structure> parse_structure(std::string_view name) {
  for (Structure s : {Structure::Generic, Structure::ParallelGalePair, Structure::ZeroGalePair, Structure::MirrorPair}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void InstanceSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorKind::InfeasibleSpec,
                "n=" + std::to_string(n) + " r=" + std::to_string(r) + " " + std::string(to_string(structure)) + ": " + why);
  };
  if (n < 3) fail("need n >= 3");
  if (r < 2) fail("need r >= 2");
  if (r > n - 1) fail("need r <= n-1");
  if (structure != Structure::Generic) {
    if (pair.k < 0 || pair.l >= n || pair.k >= pair.l) fail("pair must satisfy 1 <= k < l <= n");
  }
  switch (structure) {
    case Structure::Generic:
      break;
    case Structure::ParallelGalePair:
      if (r > n - 2) fail("parallel Gale rows need r <= n-2");
      // The other n-2 points must affinely span a hyperplane through the
      // center; on a circle that hyperplane meets the sphere in two points.
      if (r == 2 && n != 4) fail("with r = 2 only n = 4 admits this construction");
      break;
    case Structure::ZeroGalePair:
      if (r > n - 3) fail("zero Gale rows need r <= n-3");
      // The other points live on an (r-3)-sphere; it must be infinite.
      if (r < 4) fail("zero Gale rows need r >= 4 for distinct points");
      break;
    case Structure::MirrorPair:
      if (n != r + 1) fail("mirror construction needs n = r+1");
      break;
  }
}

namespace {

using Rng = std::mt19937_64;

Vector gaussian(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v;
}

Vector random_unit(Rng& rng, int dim) {
  Vector v = gaussian(rng, dim);
  return v / v.norm();
}

Matrix random_orthogonal(Rng& rng, int dim) {
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j) g.col(j) = gaussian(rng, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

Matrix squared_distances(const Matrix& p) {
  const Eigen::Index n = p.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).squaredNorm();
  }
  d.diagonal().setZero();
  return d;
}

// Rows: points. The n-2 "other" points fill every index except k and l.
Matrix assemble(const std::vector<Vector>& others, const Vector& pk, const Vector& pl, EntryIndex pair, int n) {
  Matrix p(n, pk.size());
  std::size_t next = 0;
  for (int i = 0; i < n; ++i) {
    if (i == pair.k) {
      p.row(i) = pk.transpose();
    } else if (i == pair.l) {
      p.row(i) = pl.transpose();
    } else {
      p.row(i) = others[next++].transpose();
    }
  }
  return p;
}

Matrix build_points(const InstanceSpec& spec, Rng& rng) {
  const int n = spec.n;
  const int r = spec.r;
  switch (spec.structure) {
    case Structure::Generic: {
      Matrix p(n, r);
      for (int i = 0; i < n; ++i) p.row(i) = random_unit(rng, r).transpose();
      return p;
    }
    case Structure::ParallelGalePair: {
      // Others on the great sphere normal to basis column 0.
      const Matrix q = random_orthogonal(rng, r);
      std::vector<Vector> others;
      for (int i = 0; i < n - 2; ++i) {
        Vector x = random_unit(rng, r - 1);
        if (r == 2) x(0) = (i % 2 == 0) ? 1.0 : -1.0;
        others.push_back(q.rightCols(r - 1) * x);
      }
      return assemble(others, random_unit(rng, r), random_unit(rng, r), spec.pair, n);
    }
    case Structure::ZeroGalePair: {
      // Others on the flat  a q_0 + span(q_1..q_{r-2}),  0 < a < 1.
      const Matrix q = random_orthogonal(rng, r);
      std::uniform_real_distribution<double> offset(0.2, 0.7);
      const double a = offset(rng);
      const double rad = std::sqrt(1.0 - a * a);
      std::vector<Vector> others;
      for (int i = 0; i < n - 2; ++i) {
        const Vector x = random_unit(rng, r - 2);
        others.push_back(a * q.col(0) + rad * q.block(0, 1, r, r - 2) * x);
      }
      return assemble(others, random_unit(rng, r), random_unit(rng, r), spec.pair, n);
    }
    case Structure::MirrorPair: {
      const Matrix q = random_orthogonal(rng, r);
      const Vector h = q.col(0);
      std::vector<Vector> others;
      for (int i = 0; i < n - 2; ++i) {
        Vector x = random_unit(rng, r - 1);
        others.push_back(q.rightCols(r - 1) * x);
      }
      const Vector pk = random_unit(rng, r);
      const Vector pl = pk - 2.0 * h.dot(pk) * h;
      return assemble(others, pk, pl, spec.pair, n);
    }
  }
  return {};
}

constexpr int kMaxAttempts = 20000;
constexpr double kMinSpectralRatio = 1e-2;
constexpr double kMinExitSlope = 2e-4;

// Sine of the angle between u and v is either below 1e-8 or at least 0.02 (zero
// vectors count as separated).
bool separated(const Vector& u, const Vector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < 1e-8 || nv < 1e-8) return true;
  const double cosine = std::clamp(std::abs(u.dot(v)) / (nu * nv), 0.0, 1.0);
  const double sine = std::sqrt(1.0 - cosine * cosine);
  return sine < 1e-8 || sine >= 0.02;
}

bool well_conditioned(const Matrix& d, const EdmProfile& prof, int r) {
  const Eigen::Index n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (d(i, j) < 1e-3) return false;
    }
  }
  if (prof.r != r) return false;
  // A small but nonzero w_i (for a simplex: circumcentre close to a facet)
  // puts every entry at that point next to a case boundary.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rel = std::abs(prof.w(i)) / prof.w.norm();
    if (rel > 1e-8 && rel < 0.05) return false;
  }
  const EigDecomp eig = sym_eig(prof.b);
  return eig.values(r - 1) >= kMinSpectralRatio * eig.values(0);
}

// Unit spherical instances only: every entry sits clearly inside one case.
bool cases_separated(const EdmProfile& prof) {
  const Eigen::Index n = prof.n();
  // Gale rows are either structurally zero or clearly nonzero.
  for (Eigen::Index i = 0; i < n && prof.z; ++i) {
    const double norm = prof.gale_row(static_cast<int>(i)).norm();
    if (norm > 1e-8 && norm < 0.05) return false;
  }
  // Pairs of Gale rows (plain and with the w column) are either parallel or
  // clearly apart; nearly parallel rows leave the cone only at higher order.
  if (prof.z) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k + 1; l < n; ++l) {
        if (!separated(prof.gale_row(k), prof.gale_row(l))) return false;
        if (!separated(prof.gale_tilde_row(k), prof.gale_tilde_row(l))) return false;
      }
    }
  }
  // At t = 0 the first-order change of lambda_min(2E - D - tE^{kl}) is
  // -t (q_k.q_l +- |q_k||q_l|) over an orthonormal basis Q of span [w Z].
  // Whichever sides leave T<= must do so at a visible rate.
  {
    Matrix zt = prof.z_tilde;
    zt.col(0) /= zt.col(0).norm();
    const Eigen::HouseholderQR<Matrix> qr(zt);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, zt.cols());
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k + 1; l < n; ++l) {
        const double prod = q.row(k).norm() * q.row(l).norm();
        const double dot = q.row(k).dot(q.row(l));
        for (double slope : {prod + dot, prod - dot}) {
          if (slope > 1e-12 && slope < kMinExitSlope) return false;
        }
      }
    }
  }
  // Where the radius formula applies, |s^k|^2 and c^2 |s^l|^2 either coincide
  // or are well apart; in between the two roots of g and f nearly cancel.
  const Matrix& bd = prof.b_dag.matrix();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      if (prof.z && (prof.gale_row(k).norm() > 1e-8 || prof.gale_row(l).norm() > 1e-8)) continue;
      if (std::abs(prof.w(l)) < 1e-8 * prof.w.norm()) continue;
      const double c = prof.w(k) / prof.w(l);
      const double a = bd(k, k);
      const double b = c * c * bd(l, l);
      const double gap = std::abs(a - b) / std::max(a, b);
      if (gap > 1e-9 && gap < 1e-2) return false;
    }
  }
  return true;
}

bool structure_holds(const InstanceSpec& spec, const EdmProfile& prof) {
  const int k = spec.pair.k;
  const int l = spec.pair.l;
  switch (spec.structure) {
    case Structure::Generic:
      return true;
    case Structure::ParallelGalePair: {
      const ParallelRelation z = parallel_relation(prof.gale_row(k), prof.gale_row(l), prof.tol);
      const ParallelRelation zt = parallel_relation(prof.gale_tilde_row(k), prof.gale_tilde_row(l), prof.tol);
      return z.kind == ParallelRelation::Kind::Scalar && zt.parallel() && prof.gale_row(k).norm() > 1e-3 &&
             prof.gale_row(l).norm() > 1e-3;
    }
    case Structure::ZeroGalePair:
      return prof.gale_row_vanishes(k) && prof.gale_row_vanishes(l) &&
             std::abs(prof.w(l)) > 1e-3 * prof.w.norm() && std::abs(prof.w(k)) > 1e-3 * prof.w.norm();
    case Structure::MirrorPair:
      return std::abs(prof.w(l)) > 1e-3 * prof.w.norm();
  }
  return false;
}

}  // namespace

DistanceMatrix gen_unit_spherical(const InstanceSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Matrix p = build_points(spec, rng);
    const DistanceMatrix d = DistanceMatrix::from_matrix(squared_distances(p));
    if (!is_edm(d)) continue;
    const EdmProfile prof = profile(d);
    if (!well_conditioned(d.matrix(), prof, spec.r)) continue;
    if (std::abs(2.0 * prof.e_dot_w() - 1.0) > 1e-10) continue;
    if (!cases_separated(prof)) continue;
    if (!structure_holds(spec, prof)) continue;
    return d;
  }
  throw Error(ErrorKind::InfeasibleSpec, "generator did not find a well-conditioned instance");
}

DistanceMatrix gen_nonspherical(int n, int r, std::uint64_t seed) {
  if (n < 3 || r < 1 || r > n - 2) {
    throw Error(ErrorKind::InfeasibleSpec, "nonspherical EDMs need 1 <= r <= n-2 and n >= 3");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix p(n, r);
    for (int i = 0; i < n; ++i) p.row(i) = gaussian(rng, r).transpose();
    const DistanceMatrix d = DistanceMatrix::from_matrix(squared_distances(p));
    const EdmProfile prof = profile(d);
    if (!well_conditioned(d.matrix(), prof, r)) continue;
    const double ew = prof.e_dot_w();
    if (std::abs(ew) > 1e-9 * std::max(1.0, std::sqrt(static_cast<double>(n)) * prof.w.norm())) continue;
    if (rank_of(SymMatrix(d.matrix())) != r + 2) continue;
    return d;
  }
  throw Error(ErrorKind::InfeasibleSpec, "generator did not find a nonspherical instance");
}

double tleq_margin(const DistanceMatrix& d, EntryIndex entry, double t) {
  const Eigen::Index n = d.n();
  return min_eigenvalue(SymMatrix(Matrix::Constant(n, n, 2.0) - d.perturbed(entry, t)));
}

std::optional<double> direct_radius_sq(const Matrix& m, const TolerancePolicy& tol) {
  const Vector w = w_vector(m, tol);
  const double ew = w.sum();
  if (!(ew > tol.recon_rel * std::sqrt(static_cast<double>(m.rows())) * w.norm())) return std::nullopt;
  return 1.0 / (2.0 * ew);
}

std::vector<SweepRecord> membership_scan(const DistanceMatrix& d, EntryIndex entry, std::span<const double> ts,
                                         const TolerancePolicy& tol) {
  std::vector<SweepRecord> out;
  out.reserve(ts.size());
  const Eigen::Index n = d.n();
  for (double t : ts) {
    SweepRecord rec;
    rec.t = t;
    const Matrix m = d.perturbed(entry, t);
    rec.is_edm = is_edm(m, tol);
    const Vector w = w_vector(m, tol);
    if (rec.is_edm) {
      rec.radius_sq = direct_radius_sq(m, tol);
      rec.is_spherical = rec.radius_sq.has_value();
    }
    rec.in_t_leq = rec.is_edm && is_psd(SymMatrix(Matrix::Constant(n, n, 2.0) - m), tol);
    rec.in_t_eq = rec.in_t_leq && unit_spherical_by_w(w);
    out.push_back(rec);
  }
  return out;
}

namespace {

bool lambda_feasible(const Matrix& m, double lambda) {
  const Eigen::Index n = m.rows();
  const SymMatrix s(Matrix::Constant(n, n, 2.0 * lambda) - m);
  const EigDecomp eig = sym_eig(s);
  // Tolerance tied to D(t), plus eigensolver roundoff on the 2 lambda E term;
  // scaling by the full spectrum would let any matrix pass for large lambda.
  const double slack = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()) +
                       64.0 * std::numeric_limits<double>::epsilon() * 2.0 * lambda * static_cast<double>(n);
  return eig.values(n - 1) >= -slack;
}

}  // namespace

double sdp_min_radius_sq(const DistanceMatrix& d, EntryIndex entry, double t) {
  const Matrix m = d.perturbed(entry, t);
  if (lambda_feasible(m, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!lambda_feasible(m, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::Infeasible, "no lambda makes 2 lambda E - D(t) semidefinite");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (lambda_feasible(m, mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double tleq_boundary(const DistanceMatrix& d, EntryIndex entry, double feasible_t, double infeasible_t) {
  const Eigen::Index n = d.n();
  auto feasible = [&](double t) {
    const SymMatrix s(Matrix::Constant(n, n, 2.0) - d.perturbed(entry, t));
    const EigDecomp eig = sym_eig(s);
    return eig.values(n - 1) >= -1e-12 * std::max(1.0, max_abs_eigenvalue(eig));
  };
  double in = feasible_t;
  double out = infeasible_t;
  while (std::abs(out - in) > 1e-12 * (1.0 + std::abs(in))) {
    const double mid = 0.5 * (in + out);
    (feasible(mid) ? in : out) = mid;
  }
  return 0.5 * (in + out);
}

}  // namespace edmp

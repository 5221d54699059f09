#include "edmp/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "edmp/cayley_menger.hpp"
#include "edmp/errors.hpp"
#include "edmp/oracle.hpp"

namespace edmp {

namespace {

double rel_diff(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Midpoints of N equal cells of [lo, hi]; {lo} when the interval is a point.
std::vector<double> interior_samples(const Interval& iv, int count) {
  if (iv.width() <= 0.0) return {iv.lo};
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(iv.lo + (i + 0.5) / count * iv.width());
  return ts;
}

struct Recipe {
  Structure structure;
  int n;
  int r;
  const char* expected;  // case tag of the designated entry; nullptr when not fixed
};

// Round-robin plan, one recipe per instance, aimed at every case tag.
Recipe plan_recipe(int slot, int nmax, std::mt19937_64& rng) {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Recipe simplex_fallback{Structure::Generic, pick(3, nmax), 0, "PairUnit"};
  auto simplex = [&]() {
    Recipe r = simplex_fallback;
    r.r = r.n - 1;
    return r;
  };
  switch (slot % 6) {
    case 0:
      return simplex();
    case 1: {
      const int n = pick(3, nmax);
      return {Structure::MirrorPair, n, n - 1, "SingletonUnit"};
    }
    case 2: {
      if (nmax < 4) return simplex();
      if (nmax < 5 || pick(0, 3) == 0) return {Structure::ParallelGalePair, 4, 2, "ContinuumUnit"};
      const int n = pick(5, nmax);
      return {Structure::ParallelGalePair, n, pick(3, n - 2), "ContinuumUnit"};
    }
    case 3: {
      if (nmax < 4) return simplex();
      const int n = pick(4, nmax);
      return {Structure::Generic, n, n - 2, "TleqTrivial"};
    }
    case 4: {
      if (nmax < 5) return simplex();
      const int n = pick(5, nmax);
      return {Structure::Generic, n, pick(2, n - 3), "NotYielding"};
    }
    default: {
      if (nmax < 7) return simplex();
      const int n = pick(7, nmax);
      return {Structure::ZeroGalePair, n, pick(4, n - 3), "PairUnit"};
    }
  }
}

struct InstanceResult {
  std::map<std::string, CheckTally> tallies;
  std::vector<CheckFailure> failures;
  std::string target_tag;
  std::map<std::string, int> entry_tags;
};

class Checker {
 public:
  Checker(int instance, std::uint64_t seed, InstanceResult& out) : instance_(instance), seed_(seed), out_(out) {}

  void expect(const std::string& name, bool ok, const std::string& detail = {}) {
    CheckTally& t = out_.tallies[name];
    ++t.run;
    if (!ok) {
      ++t.failed;
      out_.failures.push_back({instance_, seed_, name, detail});
    }
  }

  // Runs body; an exception counts as a failure of `name`.
  template <class F>
  void guard(const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& ex) {
      expect(name, false, std::string("exception: ") + ex.what());
    }
  }

 private:
  int instance_;
  std::uint64_t seed_;
  InstanceResult& out_;
};

std::string entry_name(EntryIndex e) { return "(" + std::to_string(e.k + 1) + "," + std::to_string(e.l + 1) + ")"; }

void check_profile(Checker& ck, const DistanceMatrix& d, const EdmProfile& prof, int spec_r, std::mt19937_64& rng) {
  const int n = d.n();
  const Vector e = Vector::Ones(n);
  const Matrix& b = prof.b.matrix();
  ck.expect("profile.unit_radius", prof.unit_spherical && std::abs(2.0 * prof.e_dot_w() - 1.0) <= 1e-10,
            "2e^Tw = " + num(2.0 * prof.e_dot_w()));
  ck.expect("profile.embedding_dim", prof.r == spec_r && rank_of(prof.b, prof.tol) == spec_r,
            "r = " + std::to_string(prof.r) + ", expected " + std::to_string(spec_r));
  const double bn = std::max(b.norm(), 1e-300);
  ck.expect("profile.gram", (b * e).norm() <= 1e-10 * bn && (b - prof.p * prof.p.transpose()).norm() <= 1e-10 * bn &&
                                (prof.p.transpose() * e).norm() <= 1e-10 * std::sqrt(bn * n));
  const Matrix& dm = d.matrix();
  const Matrix& dd = prof.d_dag.matrix();
  ck.expect("profile.w", (dm * prof.w - e).norm() <= 1e-8 * std::sqrt(double(n)) &&
                             (prof.w - dd * dm * prof.w).norm() <= 1e-10 * prof.w.norm());
  ck.expect("profile.rank_D", rank_of(SymMatrix(dm), prof.tol) == prof.r + 1);
  if (prof.r <= n - 2) {
    const Matrix& z = *prof.z;
    const bool ok = z.cols() == n - prof.r - 1 && (b * z).norm() <= 1e-8 * bn && (e.transpose() * z).norm() <= 1e-10 &&
                    (z.transpose() * z - Matrix::Identity(z.cols(), z.cols())).norm() <= 1e-10 &&
                    (dm * z).norm() <= 1e-8 * dm.norm();
    ck.expect("profile.gale", ok);
  } else {
    ck.expect("profile.gale", !prof.z.has_value());
  }
  // Relabeling points leaves the embedding dimension and radius unchanged.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix pd(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pd(i, j) = dm(perm[i], perm[j]);
  const EdmProfile pp = profile(DistanceMatrix::from_matrix(pd), prof.tol);
  ck.expect("profile.permutation", pp.r == prof.r && pp.radius && rel_diff(*pp.radius, *prof.radius) <= 1e-10);
  if (prof.regular) {
    const Vector expect_w = e / (2.0 * n * (*prof.radius) * (*prof.radius));
    ck.expect("profile.regular", (prof.w - expect_w).norm() <= 1e-9);
  }
}

void check_identities(Checker& ck, const DistanceMatrix& d, const EdmProfile& prof) {
  const int n = d.n();
  const Matrix& dm = d.matrix();
  ck.guard("identity.bdag", [&] {
    const double err = rel_diff(bdag_identity(d, prof.tol).matrix(), pinv(prof.b, prof.tol).matrix());
    ck.expect("identity.bdag", err <= 1e-8, "rel err " + num(err));
  });
  ck.guard("identity.bprime_dag", [&] {
    const SymMatrix bp(Matrix::Ones(n, n) - 0.5 * dm);
    const double err = rel_diff(bprime_dag_identity(d, prof.tol).matrix(), pinv(bp, prof.tol).matrix());
    ck.expect("identity.bprime_dag", err <= 1e-8, "rel err " + num(err));
  });
  ck.guard("identity.cm_block", [&] {
    const double err = rel_diff(cm_dag_block(d, prof.tol).matrix(), pinv(SymMatrix(bordered(dm)), prof.tol).matrix());
    ck.expect("identity.cm_block", err <= 1e-8, "rel err " + num(err));
  });
  {
    const Matrix& a = dm;
    const Matrix& x = prof.d_dag.matrix();
    const bool ok = rel_diff(a * x * a, a) <= 1e-8 && rel_diff(x * a * x, x) <= 1e-8 &&
                    rel_diff(a * x, (a * x).transpose()) <= 1e-8 && rel_diff(x * a, (x * a).transpose()) <= 1e-8 &&
                    rel_diff(pinv(prof.d_dag, prof.tol).matrix(), a) <= 1e-8;
    ck.expect("linalg.penrose", ok);
  }
}

void check_cayley_menger(Checker& ck, const DistanceMatrix& d, const EdmProfile& prof, std::uint64_t seed) {
  const int n = d.n();
  ck.guard("cm.view", [&] {
    const CayleyMengerView view = cm_build(d, prof.tol);
    Vector expect_wt(n + 1);
    expect_wt(0) = -1.0;
    expect_wt.tail(n) = 2.0 * prof.w;
    const double et_wt = view.w_tilde.sum();
    const bool ok = cm_is_edm(view) && std::abs(cm_radius_sq(view) - 1.0) <= 1e-8 && cm_embedding_dim(view) == prof.r &&
                    cm_gale(view).cols() == n - prof.r && (view.w_tilde - expect_wt).norm() <= 1e-8 * expect_wt.norm() &&
                    std::abs(et_wt) <= 1e-8 * view.w_tilde.norm() && rank_of(view.d_tilde, prof.tol) == prof.r + 2;
    ck.expect("cm.view", ok, "e~^T w~ = " + num(et_wt));
  });
  // Converse directions: radius 2, radius 1/2, and a nonspherical EDM never
  // give a nonspherical bordered EDM.
  ck.guard("cm.converse", [&] {
    auto bordered_is_nonspherical_edm = [&](const DistanceMatrix& src) {
      const CayleyMengerView v = cm_build(src, prof.tol);
      if (!cm_is_edm(v)) return false;
      return std::abs(v.w_tilde.sum()) <= 1e-8 * v.w_tilde.norm();
    };
    const CayleyMengerView big = cm_build(d.scaled(4.0), prof.tol);
    const CayleyMengerView small = cm_build(d.scaled(0.25), prof.tol);
    bool ok = !cm_is_edm(big) && cm_is_edm(small) && std::abs(cm_radius_sq(small) - 0.25) <= 1e-8 &&
              !bordered_is_nonspherical_edm(d.scaled(4.0)) && !bordered_is_nonspherical_edm(d.scaled(0.25));
    if (n >= 4) {
      const DistanceMatrix ns = gen_nonspherical(n, std::min(prof.r, n - 2), mix_seed(seed ^ 0x5bd1e995ULL));
      const EdmProfile np = profile(ns, prof.tol);
      ok = ok && !np.spherical && rank_of(SymMatrix(ns.matrix()), prof.tol) == np.r + 2 && !cm_is_edm(cm_build(ns, prof.tol));
    }
    ck.expect("cm.converse", ok);
  });
}

void check_entry(Checker& ck, const DistanceMatrix& d, const EdmProfile& prof, EntryIndex entry, bool designated,
                 InstanceResult& out) {
  const int n = d.n();
  const std::string where = entry_name(entry);
  std::optional<PerturbationReport> classified;
  try {
    classified = classify(prof, entry);
    ck.expect("entry.classify", true);
  } catch (const std::exception& ex) {
    ck.expect("entry.classify", false, where + " " + ex.what());
    return;
  }
  const PerturbationReport& rep = *classified;
  const std::string tag(to_string(rep.case_tag));
  ++out.entry_tags[tag];
  if (designated) out.target_tag = tag;

  const YieldingReport& y = rep.yielding;
  const Interval yi = y.interval;
  const Interval tl = rep.t_leq;
  {
    bool ok = yi.lo <= 0.0 && yi.hi >= 0.0 && (y.yielding == (yi.hi != yi.lo));
    if (y.theta_lower) ok = ok && *y.theta_lower < 0.0;
    if (y.theta_upper) ok = ok && *y.theta_upper > 0.0;
    const double slack = 1e-9 * std::max(1.0, yi.width());
    ok = ok && tl.lo >= yi.lo - slack && tl.hi <= yi.hi + slack && tl.lo <= 0.0 && tl.hi >= 0.0;
    ck.expect("yielding.interval_shape", ok, where);
  }

  // Endpoints of the yielding interval are tight for is_edm. An unyielding
  // entry with a zero Gale row leaves the cone only at second order in t,
  // hence the wider step there.
  ck.guard("yielding.endpoints", [&] {
    const double delta = y.yielding ? 1e-4 * (yi.width() + 1.0) : 1e-2;
    const bool out_hi = !is_edm(d.perturbed(entry, yi.hi + delta), prof.tol);
    const bool out_lo = !is_edm(d.perturbed(entry, yi.lo - delta), prof.tol);
    const bool in_hi = !y.yielding || is_edm(d.perturbed(entry, yi.hi), prof.tol);
    const bool in_lo = !y.yielding || is_edm(d.perturbed(entry, yi.lo), prof.tol);
    ck.expect("yielding.endpoints", out_hi && out_lo && in_hi && in_lo,
              where + " [" + num(yi.lo) + ", " + num(yi.hi) + "] outside " + std::to_string(out_lo) + std::to_string(out_hi) +
                  " inside " + std::to_string(in_lo) + std::to_string(in_hi) + " " + std::string(to_string(rep.case_tag)));
  });

  // T<= against lambda_min(2E - D - tE^{kl}).
  ck.guard("tleq.membership", [&] {
    const std::vector<double> inside = interior_samples(tl, 20);
    bool ok = true;
    std::string detail = where;
    for (double t : inside) {
      const double m = tleq_margin(d, entry, t);
      if (m < -1e-8 * n) {
        ok = false;
        detail += " interior t=" + num(t) + " margin " + num(m);
      }
    }
    for (double t : {tl.lo - 1e-3, tl.hi + 1e-3}) {
      const double m = tleq_margin(d, entry, t);
      if (!(m < -1e-8 * n)) {
        ok = false;
        detail += " exterior t=" + num(t) + " margin " + num(m) + " " + tag;
      }
    }
    const std::vector<SweepRecord> scan = membership_scan(d, entry, inside, prof.tol);
    for (const SweepRecord& rec : scan) {
      ok = ok && rec.in_t_leq && rec.is_edm && (!rec.in_t_eq || rec.in_t_leq);
    }
    ck.expect("tleq.membership", ok, detail);
  });

  // T= members are unit spherical; for Pair/Singleton the rest of T<= is not.
  ck.guard("teq.membership", [&] {
    bool ok = true;
    std::string detail = where;
    auto deviation = [&](double t) { return std::abs(2.0 * w_vector(d.perturbed(entry, t), prof.tol).sum() - 1.0); };
    std::vector<double> members;
    if (rep.t_eq.kind == TeqSet::Kind::Continuum) {
      members = interior_samples(rep.t_eq.interval, 20);
    } else {
      members = rep.t_eq.values;
    }
    for (double t : members) {
      const double dev = deviation(t);
      if (dev > 1e-8) {
        ok = false;
        detail += " member t=" + num(t) + " dev " + num(dev);
      }
    }
    if (rep.t_eq.kind != TeqSet::Kind::Continuum && tl.width() > 0.0) {
      for (double t : interior_samples(tl, 20)) {
        if (rep.t_eq.contains(t, 1e-3 * tl.width())) continue;
        const double dev = deviation(t);
        if (!(dev > 1e-6)) {
          ok = false;
          detail += " non-member t=" + num(t) + " dev " + num(dev);
        }
      }
    }
    if (!ok && rep.coefficients) {
      detail += " gap " + num(rep.coefficients->coincidence_gap) + " w_l " + num(rep.coefficients->w_l) + " c " + num(rep.coefficients->c) + " theta_c " +
                num(rep.coefficients->theta_c) + " |w| " + num(prof.w.norm()) + " tleq [" + num(tl.lo) + "," + num(tl.hi) + "]";
    }
    ck.expect("teq.membership", ok, detail);
  });

  // Closed-form radius against 1/(2 e^T w(t)).
  ck.guard("radius.direct", [&] {
    bool ok = true;
    std::string detail = where;
    std::vector<double> ts = interior_samples(tl, 20);
    ts.push_back(0.0);
    for (double t : ts) {
      const double closed = radius_squared(prof, entry, t);
      const std::optional<double> direct = direct_radius_sq(d.perturbed(entry, t), prof.tol);
      if (!direct || rel_diff(closed, *direct) > 1e-8) {
        ok = false;
        detail += " t=" + num(t) + " closed " + num(closed) + " direct " + (direct ? num(*direct) : "none");
      }
    }
    ck.expect("radius.direct", ok, detail);
  });

  if (rep.coefficients) {
    const RadiusCoefficients& rc = *rep.coefficients;
    const Matrix& bd = prof.b_dag.matrix();
    const int k = entry.k;
    const int l = entry.l;

    ck.guard("radius.cross_path", [&] {
      bool ok = true;
      std::string detail = where;
      for (double t : interior_samples(tl, 20)) {
        const double closed = rc.radius_squared(t);
        const double cm = 1.0 - 0.5 * cm_w_inner(prof, entry, t);
        const double cm_direct = cm_w_inner_direct(d, entry, t, prof.tol);
        const double direct = *direct_radius_sq(d.perturbed(entry, t), prof.tol);
        if (rel_diff(closed, cm) > 1e-10 || rel_diff(closed, direct) > 1e-8 || rel_diff(cm, direct) > 1e-8 ||
            std::abs(cm_w_inner(prof, entry, t) - cm_direct) > 1e-8 * std::max(1.0, std::abs(cm_direct))) {
          ok = false;
          detail += " t=" + num(t) + " f/g " + num(closed) + " cm " + num(cm) + " direct " + num(direct);
        }
      }
      ck.expect("radius.cross_path", ok, detail);
    });

    ck.guard("cm.g_polynomial", [&] {
      const GPolynomial gp = cm_g_polynomial(cm_build(d, prof.tol), entry);
      const double scale = std::max({1.0, std::abs(rc.beta1), std::abs(rc.beta2)});
      ck.expect("cm.g_polynomial", std::abs(gp.c0 - 1.0) <= 1e-10 && std::abs(gp.c1 - rc.beta1) <= 1e-10 * scale &&
                                       std::abs(gp.c2 - rc.beta2) <= 1e-10 * scale,
                where);
    });

    ck.expect("beta2.negative", bd(k, k) * bd(l, l) - bd(k, l) * bd(k, l) > 1e-12 * bd(k, k) * bd(l, l), where);

    // Boundary values of f.
    ck.guard("lemma.f_boundary", [&] {
      const double nk = std::sqrt(bd(k, k));
      const double nl = std::sqrt(bd(l, l));
      const double c = rc.c;
      const double wl2 = rc.w_l * rc.w_l;
      auto f_scale = [&](double t) { return 1.0 + std::abs(rc.alpha1 * t) + std::abs(rc.alpha2 * t * t); };
      const double den_lo = bd(k, l) - nk * nl;
      const double den_hi = bd(k, l) + nk * nl;
      const double lhs_lo = rc.f(rc.theta_lower) * den_lo * den_lo;
      const double rhs_lo = 4.0 * wl2 * (nk - c * nl) * (nk - c * nl);
      const double lhs_hi = rc.f(rc.theta_upper) * den_hi * den_hi;
      const double rhs_hi = 4.0 * wl2 * (nk + c * nl) * (nk + c * nl);
      const double q = bd(k, k) + c * c * bd(l, l) - 2.0 * c * bd(k, l);
      const double rhs_c = (bd(k, k) - c * c * bd(l, l)) * (bd(k, k) - c * c * bd(l, l)) / (q * q);
      const bool ok = std::abs(lhs_lo - rhs_lo) <= 1e-8 * std::max(std::abs(rhs_lo), f_scale(rc.theta_lower) * den_lo * den_lo) &&
                      std::abs(lhs_hi - rhs_hi) <= 1e-8 * std::max(std::abs(rhs_hi), f_scale(rc.theta_upper) * den_hi * den_hi) &&
                      std::abs(rc.f(rc.theta_c) - rhs_c) <= 1e-8 * f_scale(rc.theta_c) &&
                      std::abs(rc.g(rc.theta_c) - rhs_c) <= 1e-8 * (1.0 + std::abs(rc.beta1 * rc.theta_c) + std::abs(rc.beta2 * rc.theta_c * rc.theta_c));
      ck.expect("lemma.f_boundary", ok, where + " f(lo)*den^2 " + num(lhs_lo) + " vs " + num(rhs_lo));
    });

    if (rc.coincident_root) {
      ck.guard("teq.limit", [&] {
        const double at = rc.radius_squared(rc.theta_c);
        const double expect = 1.0 - 4.0 * rc.w_l * rc.w_l / bd(l, l);
        const double lhopital = rc.f_prime(rc.theta_c) / rc.g_prime(rc.theta_c);
        ck.expect("teq.limit", rel_diff(at, expect) <= 1e-8 && rel_diff(at, lhopital) <= 1e-8 && at < 1.0,
                  where + " limit " + num(at) + " expected " + num(expect));
      });
    }
  }

  // Ordering of theta_c against theta bounds, wherever all three exist.
  const std::optional<double> th_c = rep.coefficients ? std::optional<double>(rep.coefficients->theta_c) : y.theta_c;
  const std::optional<double> c_opt = rep.coefficients ? std::optional<double>(rep.coefficients->c)
                                      : (y.gale_relation.kind == ParallelRelation::Kind::Scalar
                                             ? std::optional<double>(y.gale_relation.c)
                                             : std::nullopt);
  if (th_c && c_opt && y.theta_lower && y.theta_upper) {
    const Matrix& bd = prof.b_dag.matrix();
    const double nk = std::sqrt(bd(entry.k, entry.k));
    const double nl = std::sqrt(bd(entry.l, entry.l));
    const double c = *c_opt;
    const double q = bd(entry.k, entry.k) + c * c * bd(entry.l, entry.l) - 2.0 * c * bd(entry.k, entry.l);
    const double gap_lo = -2.0 * (nk - c * nl) * (nk - c * nl) / (q * (bd(entry.k, entry.l) - nk * nl));
    const double gap_hi = 2.0 * (nk + c * nl) * (nk + c * nl) / (q * (bd(entry.k, entry.l) + nk * nl));
    const double scale = std::max({std::abs(*th_c), std::abs(*y.theta_lower), std::abs(*y.theta_upper)});
    const double lo_diff = *th_c - *y.theta_lower;
    const double hi_diff = *y.theta_upper - *th_c;
    ck.expect("lemma.theta_order",
              lo_diff >= -1e-8 * scale && hi_diff >= -1e-8 * scale && std::abs(lo_diff - gap_lo) <= 1e-8 * scale &&
                  std::abs(hi_diff - gap_hi) <= 1e-8 * scale,
              where);
  }

  // T<= endpoints against sign changes of lambda_min, on every yielding entry.
  if (y.yielding) ck.guard("tleq.bisection", [&] {
    const double step = std::max(1e-2, 0.25 * tl.width());
    const double mid = 0.5 * (tl.lo + tl.hi);
    const double lo = tleq_boundary(d, entry, mid, tl.lo - step);
    const double hi = tleq_boundary(d, entry, mid, tl.hi + step);
    ck.expect("tleq.bisection",
              std::abs(lo - tl.lo) <= 1e-6 * std::max(1.0, std::abs(tl.lo)) &&
                  std::abs(hi - tl.hi) <= 1e-6 * std::max(1.0, std::abs(tl.hi)),
              where + " bisection [" + num(lo) + ", " + num(hi) + "] vs [" + num(tl.lo) + ", " + num(tl.hi) + "]");
  });

  if (!designated) return;

  ck.guard("sdp.oracle", [&] {
    bool ok = true;
    std::string detail = where;
    std::vector<double> ts = interior_samples(tl, 10);
    for (double t : ts) {
      const double lam = sdp_min_radius_sq(d, entry, t);
      const double closed = radius_squared(prof, entry, t);
      if (std::abs(lam - closed) > 1e-7) {
        ok = false;
        detail += " t=" + num(t) + " sdp " + num(lam) + " closed " + num(closed);
      }
    }
    ck.expect("sdp.oracle", ok, detail);
  });

  ck.guard("yielding.scale", [&] {
    const double sigma2 = 2.25;
    const YieldingReport ys = yielding_report(profile(d.scaled(sigma2), prof.tol), entry);
    const double scale = std::max(1.0, yi.width());
    ck.expect("yielding.scale", ys.yielding == y.yielding && std::abs(ys.interval.lo - sigma2 * yi.lo) <= 1e-8 * sigma2 * scale &&
                                    std::abs(ys.interval.hi - sigma2 * yi.hi) <= 1e-8 * sigma2 * scale,
              where);
  });
}

InstanceResult run_instance(int index, const VerifyOptions& opts) {
  InstanceResult out;
  const std::uint64_t inst_seed = mix_seed(opts.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(index));
  std::mt19937_64 rng(inst_seed);
  Checker ck(index, inst_seed, out);

  const Recipe recipe = plan_recipe(index, opts.nmax, rng);
  InstanceSpec spec;
  spec.n = recipe.n;
  spec.r = recipe.r;
  spec.structure = recipe.structure;
  {
    std::uniform_int_distribution<int> pick(0, recipe.n - 1);
    int k = pick(rng);
    int l = pick(rng);
    while (l == k) l = pick(rng);
    spec.pair = EntryIndex::zero_based(k, l, recipe.n);
  }
  spec.seed = inst_seed;

  std::optional<DistanceMatrix> generated;
  try {
    generated = gen_unit_spherical(spec);
    ck.expect("generator.deterministic", gen_unit_spherical(spec).matrix() == generated->matrix());
  } catch (const std::exception& ex) {
    ck.expect("generator.instance", false, ex.what());
    return out;
  }
  if (opts.corrupt && index == 0) {
    generated = DistanceMatrix::from_matrix(generated->perturbed(spec.pair, 1e-3));
  }
  const DistanceMatrix& d = *generated;

  std::optional<EdmProfile> built;
  try {
    built = profile(d);
  } catch (const std::exception& ex) {
    ck.expect("profile.build", false, ex.what());
    return out;
  }
  const EdmProfile& prof = *built;
  ck.guard("profile", [&] { check_profile(ck, d, prof, spec.r, rng); });
  ck.guard("identity", [&] { check_identities(ck, d, prof); });
  ck.guard("cm", [&] { check_cayley_menger(ck, d, prof, inst_seed); });

  for (int k = 0; k < d.n(); ++k) {
    for (int l = k + 1; l < d.n(); ++l) {
      const EntryIndex entry{k, l};
      check_entry(ck, d, prof, entry, entry == spec.pair, out);
    }
  }
  if (recipe.expected != nullptr) {
    ck.expect("entry.expected_case", out.target_tag == recipe.expected,
              "designated " + entry_name(spec.pair) + " got " + out.target_tag + ", recipe expects " + recipe.expected);
  }
  return out;
}

}  // namespace

VerifySummary run_verify(const VerifyOptions& options) {
  if (options.count < 1) throw Error(ErrorKind::InvalidInput, "count must be >= 1");
  if (options.nmax < 3) throw Error(ErrorKind::InvalidInput, "nmax must be >= 3");
  std::vector<InstanceResult> results(options.count);
  std::atomic<int> next{0};
  int workers = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, options.count);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < options.count; i = next++) results[i] = run_instance(i, options);
      });
    }
  }

  VerifySummary sum;
  sum.instances = options.count;
  for (const InstanceResult& r : results) {
    for (const auto& [name, t] : r.tallies) {
      sum.by_check[name].run += t.run;
      sum.by_check[name].failed += t.failed;
      sum.checks_run += t.run;
      sum.checks_failed += t.failed;
    }
    for (const CheckFailure& f : r.failures) {
      if (sum.failures.size() < 200) sum.failures.push_back(f);
    }
    if (!r.target_tag.empty()) ++sum.case_counts[r.target_tag];
    for (const auto& [tag, c] : r.entry_tags) sum.entry_case_counts[tag] += c;
  }
  sum.coverage_enforced = options.count >= 6 * kCoveragePerTag;
  for (CaseTag tag : {CaseTag::NotYielding, CaseTag::TleqTrivial, CaseTag::ContinuumUnit, CaseTag::PairUnit,
                      CaseTag::SingletonUnit}) {
    const auto it = sum.case_counts.find(std::string(to_string(tag)));
    if (it == sum.case_counts.end() || it->second < kCoveragePerTag) sum.coverage_ok = false;
  }
  return sum;
}

}  // namespace edmp

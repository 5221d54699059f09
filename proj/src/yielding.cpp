#include "edmp/yielding.hpp"

#include <cmath>

#include "edmp/errors.hpp"

namespace edmp {

ParallelRelation parallel_relation(const Vector& u, const Vector& v, const TolerancePolicy& tol) {
  if (u.size() != v.size()) throw Error(ErrorKind::InvalidInput, "vector lengths differ");
  const bool u_zero = u.norm() <= tol.parallel_rel;
  const bool v_zero = v.norm() <= tol.parallel_rel;
  if (u_zero && v_zero) return ParallelRelation::both_zero();
  if (u_zero || v_zero) return ParallelRelation::not_parallel();
  if (!are_parallel(u, v, tol.parallel_rel)) return ParallelRelation::not_parallel();
  return ParallelRelation::scalar(u.dot(v) / v.squaredNorm());
}

namespace {

double denominator_cut(const EdmProfile& profile, EntryIndex entry) {
  const Matrix& bd = profile.b_dag.matrix();
  return profile.tol.recon_rel * std::max({bd(entry.k, entry.k), bd(entry.l, entry.l), 1e-300});
}

}  // namespace

ThetaBounds theta_bounds(const EdmProfile& profile, EntryIndex entry) {
  const Matrix& bd = profile.b_dag.matrix();
  const double kl = bd(entry.k, entry.l);
  const double root = std::sqrt(std::max(0.0, bd(entry.k, entry.k)) * std::max(0.0, bd(entry.l, entry.l)));
  const double lower_den = kl - root;
  const double upper_den = kl + root;
  const double cut = denominator_cut(profile, entry);
  if (std::abs(lower_den) <= cut || std::abs(upper_den) <= cut) {
    throw Error(ErrorKind::DegenerateDenominator, "theta bounds: s^k and s^l are (anti)parallel or zero");
  }
  return {2.0 / lower_den, 2.0 / upper_den};
}

double theta_c(const EdmProfile& profile, EntryIndex entry, double c) {
  if (c == 0.0) throw Error(ErrorKind::PreconditionViolated, "theta_c needs a nonzero c");
  const Matrix& bd = profile.b_dag.matrix();
  const double den = bd(entry.k, entry.k) + c * c * bd(entry.l, entry.l) - 2.0 * c * bd(entry.k, entry.l);
  if (den <= denominator_cut(profile, entry) * std::max(1.0, c * c)) {
    throw Error(ErrorKind::DegenerateDenominator, "theta_c: s^k - c s^l vanishes");
  }
  return -4.0 * c / den;
}

YieldingReport yielding_report(const EdmProfile& profile, EntryIndex entry) {
  YieldingReport rep;
  rep.entry = entry;
  const bool simplex = profile.r == profile.n() - 1;
  rep.gale_relation = simplex ? ParallelRelation::both_zero()
                              : parallel_relation(profile.gale_row(entry.k), profile.gale_row(entry.l), profile.tol);

  try {
    const ThetaBounds tb = theta_bounds(profile, entry);
    rep.theta_lower = tb.lower;
    rep.theta_upper = tb.upper;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateDenominator) throw;
  }

  switch (rep.gale_relation.kind) {
    case ParallelRelation::Kind::BothZero:
      if (!rep.theta_lower) theta_bounds(profile, entry);  // rethrows the degenerate case
      rep.yielding = true;
      rep.interval = {*rep.theta_lower, *rep.theta_upper};
      break;
    case ParallelRelation::Kind::Scalar: {
      const double c = rep.gale_relation.c;
      rep.theta_c = theta_c(profile, entry, c);
      rep.yielding = true;
      rep.interval = c > 0.0 ? Interval{*rep.theta_c, 0.0} : Interval{0.0, *rep.theta_c};
      break;
    }
    case ParallelRelation::Kind::NotParallel:
      rep.yielding = false;
      rep.interval = {0.0, 0.0};
      break;
  }
  return rep;
}

}  // namespace edmp

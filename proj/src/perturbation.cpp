#include "edmp/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "edmp/errors.hpp"

namespace edmp {

namespace {

constexpr double kCoincidenceBand = 1e-8;

void require_unit(const EdmProfile& profile) {
  if (!profile.unit_spherical) {
    throw Error(ErrorKind::NotUnitSpherical, "perturbation sets are defined for unit spherical EDMs");
  }
}

bool near(double t, double pole) { return std::abs(t - pole) <= 1e-9 * std::max(1.0, std::abs(pole)); }

}  // namespace

EntryStructure entry_structure(const EdmProfile& profile, EntryIndex entry) {
  require_unit(profile);
  EntryStructure out;
  out.yielding = yielding_report(profile, entry);
  out.tilde_relation = parallel_relation(profile.gale_tilde_row(entry.k), profile.gale_tilde_row(entry.l), profile.tol);
  if (!out.yielding.yielding) {
    out.kind = EntryCase::NotYielding;
    return out;
  }
  const bool simplex = profile.r == profile.n() - 1;
  switch (out.tilde_relation.kind) {
    case ParallelRelation::Kind::NotParallel:
      out.kind = EntryCase::TleqTrivial;
      break;
    case ParallelRelation::Kind::BothZero:
      out.kind = EntryCase::UnitWZero;
      break;
    case ParallelRelation::Kind::Scalar:
      if (profile.w_vanishes(entry.l)) {
        out.kind = EntryCase::UnitWZero;
      } else if (!simplex && !profile.gale_row_vanishes(entry.k)) {
        out.kind = EntryCase::UnitGaleNonzero;
      } else {
        out.kind = EntryCase::RadiusFormula;
      }
      break;
  }
  return out;
}

double RadiusCoefficients::radius_squared(double t) const {
  if (!coincident_root) {
    for (double pole : {theta_lower, theta_upper}) {
      if (near(t, pole)) {
        throw Error(ErrorKind::PoleAt, "g vanishes at t = " + std::to_string(t));
      }
    }
    return f(t) / g_factored(t);
  }
  // f(t) = (1 - s1 t)(1 - s2 t) with s1, s2 the roots of s^2 + a1 s + a2;
  // likewise g(t) = (1 - t/theta_lower)(1 - t/theta_upper). One factor is
  // shared: the f factor whose root is theta_c cancels the g factor at the
  // coincident endpoint.
  const double disc = std::max(0.0, alpha1 * alpha1 - 4.0 * alpha2);
  const double q = -0.5 * (alpha1 + std::copysign(std::sqrt(disc), alpha1));
  const double s1 = q;
  const double s2 = q != 0.0 ? alpha2 / q : 0.0;
  const double target = 1.0 / theta_c;
  const double s_other = std::abs(s1 - target) <= std::abs(s2 - target) ? s2 : s1;
  const double other_root = c > 0.0 ? theta_upper : theta_lower;
  if (near(t, other_root)) {
    throw Error(ErrorKind::PoleAt, "g vanishes at t = " + std::to_string(t));
  }
  return (1.0 - s_other * t) / (1.0 - t / other_root);
}

RadiusCoefficients radius_coefficients(const EdmProfile& profile, EntryIndex entry) {
  const EntryStructure st = entry_structure(profile, entry);
  if (st.kind != EntryCase::RadiusFormula) {
    throw Error(ErrorKind::PreconditionViolated,
                "radius formula needs w_k = c w_l != 0 and (r = n-1 or z^k = z^l = 0)");
  }
  const Matrix& dd = profile.d_dag.matrix();
  const Matrix& bd = profile.b_dag.matrix();
  const int k = entry.k;
  const int l = entry.l;

  RadiusCoefficients rc;
  rc.w_l = profile.w(l);
  rc.c = profile.w(k) / rc.w_l;
  rc.alpha1 = 2.0 * dd(k, l);
  rc.alpha2 = dd(k, l) * dd(k, l) - dd(k, k) * dd(l, l);
  rc.beta1 = -bd(k, l);
  rc.beta2 = 0.25 * (bd(k, l) * bd(k, l) - bd(k, k) * bd(l, l));

  const double c = rc.c;
  const double wl2 = rc.w_l * rc.w_l;
  const double beta1_alt = rc.alpha1 - 4.0 * c * wl2;
  const double quad = dd(k, k) + c * c * dd(l, l) - 2.0 * c * dd(k, l);
  const double beta2_alt = rc.alpha2 + 2.0 * wl2 * quad;
  const double scale1 = std::max({std::abs(rc.alpha1), 4.0 * std::abs(c) * wl2, std::abs(rc.beta1), 1e-300});
  const double scale2 = std::max({std::abs(rc.alpha2), 2.0 * wl2 * std::abs(quad), std::abs(rc.beta2), 1e-300});
  if (std::abs(beta1_alt - rc.beta1) > 1e-8 * scale1 || std::abs(beta2_alt - rc.beta2) > 1e-8 * scale2) {
    throw Error(ErrorKind::NumericalFailure, "D^dag and B^dag routes disagree on (beta1, beta2)");
  }
  if (!(rc.beta2 < 0.0)) throw Error(ErrorKind::PreconditionViolated, "beta2 must be negative");

  const ThetaBounds tb = theta_bounds(profile, entry);
  rc.theta_lower = tb.lower;
  rc.theta_upper = tb.upper;
  rc.theta_c = theta_c(profile, entry, c);
  const double kk = bd(k, k);
  const double ll = c * c * bd(l, l);
  rc.coincidence_gap = std::abs(kk - ll) / std::max({kk, ll, 1e-300});
  rc.coincident_root = rc.coincidence_gap <= kCoincidenceBand;
  return rc;
}

Interval t_leq(const EdmProfile& profile, EntryIndex entry) {
  const EntryStructure st = entry_structure(profile, entry);
  switch (st.kind) {
    case EntryCase::NotYielding:
    case EntryCase::TleqTrivial:
      return {0.0, 0.0};
    default:
      break;
  }
  if (st.tilde_relation.kind == ParallelRelation::Kind::BothZero) {
    const ThetaBounds tb = theta_bounds(profile, entry);
    return {tb.lower, tb.upper};
  }
  const double c = st.tilde_relation.c;
  const double th = theta_c(profile, entry, c);
  return c > 0.0 ? Interval{th, 0.0} : Interval{0.0, th};
}

bool TeqSet::contains(double t, double slack) const {
  if (kind == Kind::Continuum) return interval.contains(t, slack);
  return std::any_of(values.begin(), values.end(), [&](double v) { return std::abs(t - v) <= slack; });
}

TeqSet t_eq(const EdmProfile& profile, EntryIndex entry) {
  const EntryStructure st = entry_structure(profile, entry);
  TeqSet out;
  switch (st.kind) {
    case EntryCase::NotYielding:
    case EntryCase::TleqTrivial:
      out.kind = TeqSet::Kind::Singleton;
      out.values = {0.0};
      break;
    case EntryCase::UnitWZero:
    case EntryCase::UnitGaleNonzero:
      out.kind = TeqSet::Kind::Continuum;
      out.interval = t_leq(profile, entry);
      break;
    case EntryCase::RadiusFormula: {
      const RadiusCoefficients rc = radius_coefficients(profile, entry);
      if (rc.coincident_root) {
        out.kind = TeqSet::Kind::Singleton;
        out.values = {0.0};
      } else {
        out.kind = TeqSet::Kind::Pair;
        out.values = {0.0, rc.theta_c};
      }
      break;
    }
  }
  return out;
}

double radius_squared(const EdmProfile& profile, EntryIndex entry, double t, bool allow_extrapolation) {
  const EntryStructure st = entry_structure(profile, entry);
  const Interval tl = t_leq(profile, entry);
  const double slack = 1e-12 * std::max({1.0, std::abs(tl.lo), std::abs(tl.hi)});
  const bool inside = tl.contains(t, slack);
  if (st.kind == EntryCase::RadiusFormula) {
    if (!inside && !allow_extrapolation) {
      throw Error(ErrorKind::OutsideTleq, "t = " + std::to_string(t) + " lies outside T<=");
    }
    return radius_coefficients(profile, entry).radius_squared(t);
  }
  if (!inside) {
    throw Error(ErrorKind::OutsideTleq, "t = " + std::to_string(t) + " lies outside T<= and no closed form applies");
  }
  return 1.0;
}

std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::NotYielding: return "NotYielding";
    case CaseTag::TleqTrivial: return "TleqTrivial";
    case CaseTag::ContinuumUnit: return "ContinuumUnit";
    case CaseTag::PairUnit: return "PairUnit";
    case CaseTag::SingletonUnit: return "SingletonUnit";
  }
  return "Unknown";
}

std::string_view to_string(TeqSet::Kind kind) {
  switch (kind) {
    case TeqSet::Kind::Continuum: return "Continuum";
    case TeqSet::Kind::Pair: return "Pair";
    case TeqSet::Kind::Singleton: return "Singleton";
  }
  return "Unknown";
}

namespace {

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

PerturbationReport classify(const EdmProfile& profile, EntryIndex entry) {
  const EntryStructure st = entry_structure(profile, entry);
  PerturbationReport rep;
  rep.entry = entry;
  rep.yielding = st.yielding;
  rep.entry_case = st.kind;
  rep.t_leq = t_leq(profile, entry);
  rep.t_eq = t_eq(profile, entry);
  switch (st.kind) {
    case EntryCase::NotYielding: rep.case_tag = CaseTag::NotYielding; break;
    case EntryCase::TleqTrivial: rep.case_tag = CaseTag::TleqTrivial; break;
    case EntryCase::UnitWZero:
    case EntryCase::UnitGaleNonzero: rep.case_tag = CaseTag::ContinuumUnit; break;
    case EntryCase::RadiusFormula: {
      rep.coefficients = radius_coefficients(profile, entry);
      rep.case_tag = rep.coefficients->coincident_root ? CaseTag::SingletonUnit : CaseTag::PairUnit;
      const double gap = rep.coefficients->coincidence_gap;
      if (gap > kCoincidenceBand && gap <= kCoincidenceWarnBand) {
        rep.warnings.push_back("theta_c is within " + short_num(gap) +
                               " (relative) of a root of g; Pair is close to degenerating to Singleton");
      } else if (rep.coefficients->coincident_root && gap > 1e-10) {
        rep.warnings.push_back("Singleton decided inside the tolerance band (relative gap " + short_num(gap) + ")");
      }
      break;
    }
  }
  if (st.yielding.yielding && (!st.yielding.theta_lower || !st.yielding.theta_upper)) {
    rep.warnings.push_back("theta bounds are degenerate for this entry (s^k and s^l parallel)");
  }
  return rep;
}

}  // namespace edmp

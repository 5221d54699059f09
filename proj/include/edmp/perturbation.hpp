#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edmp/yielding.hpp"

namespace edmp {

/// Which characterization applies to a yielding entry of a unit spherical D.
enum class EntryCase {
  NotYielding,
  TleqTrivial,     // rows of [w Z] at k and l are not parallel
  UnitWZero,       // w_k = w_l = 0: radius stays 1 on T<=
  UnitGaleNonzero, // w_k != 0, r <= n-2, z^k != 0: radius stays 1 on T<=
  RadiusFormula,   // w_k = c w_l != 0 and (r = n-1 or z^k = z^l = 0)
};

struct EntryStructure {
  EntryCase kind = EntryCase::NotYielding;
  YieldingReport yielding;
  ParallelRelation tilde_relation;  // between rows k and l of [w Z]
};

EntryStructure entry_structure(const EdmProfile& profile, EntryIndex entry);

/// Coefficients of rho^2(t) = f(t)/g(t), f = 1 + a1 t + a2 t^2,
/// g = 1 + b1 t + b2 t^2 = b2 (t - theta_lower)(t - theta_upper).
struct RadiusCoefficients {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double c = 0.0;
  double w_l = 0.0;
  double theta_lower = 0.0;
  double theta_upper = 0.0;
  double theta_c = 0.0;
  /// |s^k|^2 = c^2 |s^l|^2 within the decision band: theta_c coincides with
  /// theta_lower (c > 0) or theta_upper (c < 0) and f shares that root.
  bool coincident_root = false;
  /// Relative gap |B^dag_kk - c^2 B^dag_ll| / max(B^dag_kk, c^2 B^dag_ll).
  double coincidence_gap = 0.0;

  double f(double t) const { return 1.0 + alpha1 * t + alpha2 * t * t; }
  double g(double t) const { return 1.0 + beta1 * t + beta2 * t * t; }
  double g_factored(double t) const { return beta2 * (t - theta_lower) * (t - theta_upper); }
  double f_prime(double t) const { return alpha1 + 2.0 * alpha2 * t; }
  double g_prime(double t) const { return beta1 + 2.0 * beta2 * t; }

  /// f/g with the factored g; on the coincident root the common factor is
  /// divided out, which equals the L'Hospital limit f'/g' there. Throws
  /// PoleAt where g vanishes and f does not.
  double radius_squared(double t) const;
};

/// Throws PreconditionViolated unless the entry falls in the RadiusFormula case.
RadiusCoefficients radius_coefficients(const EdmProfile& profile, EntryIndex entry);

/// T<=: closed interval containing 0 (possibly the point {0}).
Interval t_leq(const EdmProfile& profile, EntryIndex entry);

struct TeqSet {
  enum class Kind { Continuum, Pair, Singleton };
  Kind kind = Kind::Singleton;
  Interval interval;           // Continuum only
  std::vector<double> values;  // Pair: {0, theta_c}; Singleton: {0}

  bool contains(double t, double slack) const;
};

TeqSet t_eq(const EdmProfile& profile, EntryIndex entry);

/// rho^2 of D + tE^{kl}. Inside T<= this is exact per case; with
/// allow_extrapolation the f/g formula is also evaluated outside T<= (only in
/// the RadiusFormula case; other cases throw OutsideTleq there).
double radius_squared(const EdmProfile& profile, EntryIndex entry, double t, bool allow_extrapolation = false);

enum class CaseTag { NotYielding, TleqTrivial, ContinuumUnit, PairUnit, SingletonUnit };

std::string_view to_string(CaseTag tag);
std::string_view to_string(TeqSet::Kind kind);

struct PerturbationReport {
  EntryIndex entry;
  YieldingReport yielding;
  EntryCase entry_case = EntryCase::NotYielding;
  CaseTag case_tag = CaseTag::NotYielding;
  Interval t_leq;
  TeqSet t_eq;
  std::optional<RadiusCoefficients> coefficients;
  std::vector<std::string> warnings;
};

/// Requires a unit spherical profile (NotUnitSpherical otherwise).
PerturbationReport classify(const EdmProfile& profile, EntryIndex entry);

/// Relative band inside which Pair(0, theta_c) is reported as degenerating to
/// Singleton(0) with a warning.
inline constexpr double kCoincidenceWarnBand = 1e-5;

}  // namespace edmp

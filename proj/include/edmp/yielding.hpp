#pragma once

#include <optional>

#include "edmp/edm.hpp"

namespace edmp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double t, double slack = 0.0) const { return t >= lo - slack && t <= hi + slack; }
  bool is_point() const { return lo == hi; }
};

/// Relation between two Gale-type row vectors, u = c v.
struct ParallelRelation {
  enum class Kind { BothZero, Scalar, NotParallel };
  Kind kind = Kind::NotParallel;
  double c = 0.0;  // meaningful only for Scalar

  static ParallelRelation both_zero() { return {Kind::BothZero, 0.0}; }
  static ParallelRelation scalar(double c) { return {Kind::Scalar, c}; }
  static ParallelRelation not_parallel() { return {Kind::NotParallel, 0.0}; }

  /// BothZero or Scalar.
  bool parallel() const { return kind != Kind::NotParallel; }
};

/// Norms at or below tol.parallel_rel count as zero; a zero vector is only
/// parallel to another zero vector. c is reported with v as reference.
ParallelRelation parallel_relation(const Vector& u, const Vector& v, const TolerancePolicy& tol = {});

struct ThetaBounds {
  double lower;
  double upper;
};

/// 2 / (B^dag_kl -+ sqrt(B^dag_kk B^dag_ll)). Throws DegenerateDenominator
/// when either denominator vanishes.
ThetaBounds theta_bounds(const EdmProfile& profile, EntryIndex entry);

/// -4c / |s^k - c s^l|^2, evaluated through B^dag.
double theta_c(const EdmProfile& profile, EntryIndex entry, double c);

struct YieldingReport {
  EntryIndex entry;
  bool yielding = false;
  ParallelRelation gale_relation;
  std::optional<double> theta_lower;
  std::optional<double> theta_upper;
  std::optional<double> theta_c;
  Interval interval;
};

YieldingReport yielding_report(const EdmProfile& profile, EntryIndex entry);

}  // namespace edmp

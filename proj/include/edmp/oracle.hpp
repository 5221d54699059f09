#pragma once

// Independent checks that never touch the closed forms: eigenvalue scans,
// bisection on the semidefinite feasibility problem, and direct
// pseudoinverse radii. Also seeded generators for test instances.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "edmp/edm.hpp"

namespace edmp {

enum class Structure {
  Generic,           // n unit points in general position
  ParallelGalePair,  // z^k = c z^l != 0 with rows of [w Z] parallel as well
  ZeroGalePair,      // z^k = z^l = 0, affine dependence confined to the rest
  MirrorPair,        // simplex (n = r+1) symmetric under a reflection swapping k, l
};

std::string_view to_string(Structure s);
std::optional<Structure> parse_structure(std::string_view name);

struct InstanceSpec {
  int n = 3;
  int r = 2;
  Structure structure = Structure::Generic;
  EntryIndex pair{0, 1};  // 0-based; ignored for Generic
  std::uint64_t seed = 0;

  /// Throws InfeasibleSpec when no construction exists.
  void validate() const;
};

/// Unit spherical EDM of embedding dimension r built from unit vectors whose
/// affine hull is R^r. Deterministic in spec.seed.
DistanceMatrix gen_unit_spherical(const InstanceSpec& spec);

/// Nonspherical EDM (e^T w = 0, rank D = r+2) from generic points, r <= n-2.
DistanceMatrix gen_nonspherical(int n, int r, std::uint64_t seed);

struct SweepRecord {
  double t = 0.0;
  bool is_edm = false;
  bool is_spherical = false;
  std::optional<double> radius_sq;
  bool in_t_leq = false;
  bool in_t_eq = false;
};

std::vector<SweepRecord> membership_scan(const DistanceMatrix& d, EntryIndex entry, std::span<const double> ts,
                                         const TolerancePolicy& tol = {});

/// lambda_min(2E - (D + tE^{kl})).
double tleq_margin(const DistanceMatrix& d, EntryIndex entry, double t);

/// 1 / (2 e^T w) with w = M^dag e; nullopt when e^T w is not positive.
std::optional<double> direct_radius_sq(const Matrix& m, const TolerancePolicy& tol = {});

/// min { lambda : 2 lambda E - t E^{kl} - D >= 0 } by bisection on lambda.
/// Throws Infeasible when no lambda up to 1e12 is feasible.
double sdp_min_radius_sq(const DistanceMatrix& d, EntryIndex entry, double t);

/// Boundary of { t : 2E - D - tE^{kl} >= 0 } between a feasible t and an
/// infeasible t, by bisection to |step| <= 1e-12 (1 + |t|).
double tleq_boundary(const DistanceMatrix& d, EntryIndex entry, double feasible_t, double infeasible_t);

/// splitmix64 step, used to derive per-instance seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace edmp

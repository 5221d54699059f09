#include <doctest.h>

#include <cmath>

#include "edmp/cayley_menger.hpp"
#include "edmp/errors.hpp"
#include "edmp/oracle.hpp"
#include "support.hpp"

using namespace edmp;

namespace {

// Largest principal angle between the column spans of a and b, as a sine.
double subspace_gap(const Matrix& a, const Matrix& b) {
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  return (qb - qa * (qa.transpose() * qb)).norm();
}

}  // namespace

TEST_CASE("bordered matrix layout") {
  const Matrix b = bordered(Matrix::Zero(3, 3));
  REQUIRE(b.rows() == 4);
  CHECK(b(0, 0) == 0.0);
  for (int j = 1; j < 4; ++j) {
    CHECK(b(0, j) == 1.0);
    CHECK(b(j, 0) == 1.0);
  }
  CHECK(b.bottomRightCorner(3, 3).isZero());
}

TEST_CASE("cm_build on the triangle") {
  const CayleyMengerView v = cm_build(fixtures::example_triangle());
  Vector expect(4);
  expect << -1, 1, -1, 1;
  CHECK((v.w_tilde - expect).norm() < 1e-12);
  CHECK(std::abs(v.w_tilde.sum()) < 1e-12);
  CHECK(v.d_tilde.matrix()(2, 1) == 1.0);
  REQUIRE(v.gale_tilde.has_value());
}

TEST_CASE("cm_build on random unit spherical instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    InstanceSpec spec;
    spec.n = 4 + static_cast<int>(seed % 5);
    spec.r = 2 + static_cast<int>(seed % static_cast<std::uint64_t>(spec.n - 2));
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    const CayleyMengerView v = cm_build(d);
    CHECK(std::abs(v.w_tilde.sum()) < 1e-8);
    const Vector w = profile(d).w;
    CHECK(v.w_tilde(0) == doctest::Approx(-1.0));
    CHECK((v.w_tilde.tail(d.n()) - 2.0 * w).norm() <= 1e-8 * (1.0 + w.norm()));
  }
}

TEST_CASE("cm_is_edm and cm_radius_sq") {
  const DistanceMatrix tri = fixtures::example_triangle();
  CHECK(cm_is_edm(cm_build(tri)));
  CHECK(cm_radius_sq(cm_build(tri)) == doctest::Approx(1.0));

  const CayleyMengerView big = cm_build(tri.scaled(4.0));
  CHECK_FALSE(cm_is_edm(big));
  try {
    cm_radius_sq(big);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAnEdm);
  }

  const CayleyMengerView quarter = cm_build(tri.scaled(0.25));
  REQUIRE(cm_is_edm(quarter));
  const double direct = *direct_radius_sq(tri.scaled(0.25).matrix());
  CHECK(direct == doctest::Approx(0.25));
  CHECK(cm_radius_sq(quarter) == doctest::Approx(direct).epsilon(1e-8));

  const EdmProfile p = profile(tri);
  const DistanceMatrix moved = DistanceMatrix::from_matrix(tri.perturbed(EntryIndex::one_based(1, 3, 3), -3.0));
  CHECK(cm_radius_sq(cm_build(moved)) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(p.r == 2);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DistanceMatrix ns = gen_nonspherical(5 + static_cast<int>(seed % 3), 2, seed);
    CHECK_FALSE(cm_is_edm(cm_build(ns)));
  }
}

TEST_CASE("cm_is_edm agrees with 2E - D >= 0 and the source radius") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(0.3, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    InstanceSpec spec;
    spec.n = 5;
    spec.r = 3;
    spec.seed = 100 + static_cast<std::uint64_t>(trial);
    const double s = scale(rng);
    const DistanceMatrix d = gen_unit_spherical(spec).scaled(s);
    const bool expect = s <= 1.0;
    const CayleyMengerView v = cm_build(d);
    CHECK(cm_is_edm(v) == expect);
    const Matrix two_e_minus_d = Matrix::Constant(5, 5, 2.0) - d.matrix();
    CHECK(is_psd(SymMatrix(two_e_minus_d)) == expect);
    if (expect) CHECK(cm_radius_sq(v) == doctest::Approx(s).epsilon(1e-8));
  }
}

TEST_CASE("unit spherical source gives a nonspherical bordered EDM") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    InstanceSpec spec;
    spec.n = 4 + static_cast<int>(seed % 4);
    spec.r = spec.n - 1 - static_cast<int>(seed % 2);
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    const CayleyMengerView v = cm_build(d);
    REQUIRE(is_edm(v.d_tilde.matrix()));
    CHECK(std::abs(v.w_tilde.sum()) <= 1e-8);
    CHECK(rank_of(v.d_tilde) == cm_embedding_dim(v) + 2);

    // Converse: a source of radius != 1 borders to something that is either
    // not an EDM or spherical.
    const CayleyMengerView off = cm_build(d.scaled(0.5));
    REQUIRE(is_edm(off.d_tilde.matrix()));
    CHECK(off.w_tilde.sum() > 1e-3);
  }
}

TEST_CASE("cm_embedding_dim") {
  CHECK(cm_embedding_dim(cm_build(fixtures::example_triangle())) == 2);
  CHECK(cm_embedding_dim(cm_build(fixtures::example_square())) == 2);
  InstanceSpec spec;
  spec.n = 5;
  spec.r = 4;
  spec.seed = 3;
  CHECK(cm_embedding_dim(cm_build(gen_unit_spherical(spec))) == 4);
  try {
    cm_embedding_dim(cm_build(fixtures::example_triangle().scaled(0.5)));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnitSpherical);
  }
}

TEST_CASE("cm_gale") {
  const Matrix g = cm_gale(cm_build(fixtures::example_triangle()));
  REQUIRE(g.cols() == 1);
  Vector expect(4);
  expect << -0.5, 0.5, -0.5, 0.5;
  CHECK((g.col(0) - expect).norm() < 1e-12);

  const CayleyMengerView sq = cm_build(fixtures::example_square());
  const Matrix gs = cm_gale(sq);
  REQUIRE(gs.rows() == 5);
  REQUIRE(gs.cols() == 2);
  CHECK(gs(0, 0) == doctest::Approx(-0.5));
  CHECK(gs(0, 1) == 0.0);
  CHECK((gs.col(0).tail(4) - Vector::Constant(4, 0.125)).norm() < 1e-12);
  const Vector z = gs.col(1).tail(4);
  CHECK(std::abs(z(0) + z(1)) < 1e-12);
  CHECK(std::abs(z(0) - z(2)) < 1e-12);
  CHECK(std::abs(z(0)) > 0.1);

  // Independent: null space of the stacked centered Gram and ones row.
  const Matrix bt = centered_gram(sq.d_tilde.matrix()).matrix();
  Matrix stacked(6, 5);
  stacked << bt, Matrix::Ones(1, 5);
  const Matrix ns = nullspace_basis(stacked);
  REQUIRE(ns.cols() == 2);
  CHECK(subspace_gap(gs, ns) <= 1e-8);
  CHECK(subspace_gap(ns, gs) <= 1e-8);
}

TEST_CASE("cm_w_inner on the triangle") {
  const EdmProfile p = profile(fixtures::example_triangle());
  const EntryIndex e12 = EntryIndex::one_based(1, 2, 3);
  CHECK(std::abs(cm_w_inner(p, e12, 0.0)) < 1e-14);
  CHECK(std::abs(cm_w_inner(p, e12, 3.0)) < 1e-12);
  for (double t : {-0.4, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    const double expect = (3.0 + 3.0 * t) / (3.0 + 6.0 * t - t * t);
    CHECK(1.0 - cm_w_inner(p, e12, t) / 2.0 == doctest::Approx(expect).epsilon(1e-10));
    const double closed = cm_w_inner(p, e12, t);
    CHECK(std::abs(cm_w_inner_direct(p.d, e12, t) - closed) <= 1e-8 * std::abs(closed) + 1e-12);
  }
  try {
    cm_w_inner(p, e12, 3.0 - 2.0 * std::sqrt(3.0));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PoleAt);
  }
  const EdmProfile sq = profile(fixtures::example_square());
  try {
    cm_w_inner(sq, EntryIndex::one_based(1, 3, 4), 0.5);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
  }
}

TEST_CASE("cm_w_inner matches the quotient on generated entries") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    InstanceSpec spec;
    spec.n = 3 + static_cast<int>(seed % 5);
    spec.r = spec.n - 1;
    spec.structure = seed % 3 == 0 ? Structure::MirrorPair : Structure::Generic;
    spec.pair = {0, 1};
    spec.seed = seed;
    const EdmProfile p = profile(gen_unit_spherical(spec));
    for (int k = 0; k < spec.n; ++k) {
      for (int l = k + 1; l < spec.n; ++l) {
        const PerturbationReport rep = classify(p, {k, l});
        if (!rep.coefficients) continue;
        const Interval iv = rep.t_leq;
        for (int i = 0; i <= 19; ++i) {
          const double t = iv.lo + (iv.hi - iv.lo) * (i + 0.5) / 20.0;
          const double closed = 1.0 - cm_w_inner(p, {k, l}, t) / 2.0;
          const double quotient = radius_squared(p, {k, l}, t);
          CHECK(std::abs(closed - quotient) <= 1e-10 * std::abs(quotient));
          const auto direct = direct_radius_sq(p.d.perturbed({k, l}, t));
          REQUIRE(direct.has_value());
          CHECK(std::abs(closed - *direct) <= 1e-8 * *direct);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("g polynomial through the bordered pseudoinverse") {
  const CayleyMengerView v = cm_build(fixtures::example_triangle());
  GPolynomial g = cm_g_polynomial(v, EntryIndex::one_based(1, 2, 3));
  CHECK(std::abs(g.c0 - 1.0) <= 1e-12);
  CHECK(std::abs(g.c1 - 2.0) <= 1e-12);
  CHECK(std::abs(g.c2 + 1.0 / 3.0) <= 1e-12);
  g = cm_g_polynomial(v, EntryIndex::one_based(1, 3, 3));
  CHECK(std::abs(g.c0 - 1.0) <= 1e-12);
  CHECK(std::abs(g.c1 + 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(g.c2 + 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("cm_dag_block equals the bordered pseudoinverse") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    InstanceSpec spec;
    spec.n = 4 + static_cast<int>(seed % 4);
    spec.r = 2 + static_cast<int>(seed % static_cast<std::uint64_t>(spec.n - 2));
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    const Matrix direct = pinv(SymMatrix(bordered(d.matrix()))).matrix();
    CHECK(fixtures::rel(cm_dag_block(d).matrix(), direct) <= 1e-8);
  }
}

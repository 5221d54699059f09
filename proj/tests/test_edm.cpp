#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

#include "edmp/cayley_menger.hpp"
#include "edmp/edm.hpp"
#include "edmp/errors.hpp"
#include "edmp/oracle.hpp"
#include "support.hpp"

using namespace edmp;
using fixtures::rel;

namespace {

ErrorKind kind_of(const Matrix& m) {
  try {
    DistanceMatrix::from_matrix(m);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

// Coordinates for the tetrahedron fixture: two antipodal points and two
// orthogonal ones on the unit sphere.
Matrix tetra_points() {
  Matrix p(4, 3);
  p << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, 1;
  return p;
}

}  // namespace

TEST_CASE("EntryIndex conversion") {
  const EntryIndex e = EntryIndex::zero_based(3, 1, 5);
  CHECK(e.k == 1);
  CHECK(e.l == 3);
  CHECK(EntryIndex::one_based(1, 2, 3) == EntryIndex{0, 1});
  CHECK_THROWS_AS(EntryIndex::zero_based(2, 2, 4), Error);
  try {
    EntryIndex::one_based(1, 5, 4);
    FAIL("no throw");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::IndexOutOfRange);
  }
}

TEST_CASE("DistanceMatrix validation") {
  CHECK(kind_of(Matrix::Zero(3, 4)) == ErrorKind::InvalidInput);
  CHECK(kind_of(Matrix::Zero(2, 2)) == ErrorKind::InvalidInput);
  Matrix m = fixtures::example_triangle().matrix();
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of(m) == ErrorKind::InvalidInput);
  m = fixtures::example_triangle().matrix();
  m(0, 1) = 1.5;
  CHECK(kind_of(m) == ErrorKind::NotAnEdm);
  m = fixtures::example_triangle().matrix();
  m(1, 1) = 0.1;
  CHECK(kind_of(m) == ErrorKind::NotAnEdm);
  m = fixtures::example_triangle().matrix();
  m(0, 1) = m(1, 0) = -1;
  CHECK(kind_of(m) == ErrorKind::NotAnEdm);
}

TEST_CASE("perturbed and scaled") {
  const DistanceMatrix d = fixtures::example_triangle();
  const Matrix p = d.perturbed({0, 2}, -0.5);
  CHECK(p(0, 2) == 2.5);
  CHECK(p(2, 0) == 2.5);
  CHECK(p(0, 1) == 1.0);
  CHECK(d.scaled(4.0).matrix()(0, 2) == 12.0);
}

TEST_CASE("is_edm examples") {
  CHECK(is_edm(Matrix(Matrix::Zero(3, 3))));
  CHECK(is_edm(fixtures::example_triangle()));
  Matrix bad(3, 3);
  bad << 0, 1, 9, 1, 0, 1, 9, 1, 0;
  // Side lengths 1, 1, 3 violate the triangle inequality.
  CHECK(std::sqrt(bad(0, 2)) > std::sqrt(bad(0, 1)) + std::sqrt(bad(1, 2)));
  CHECK_FALSE(is_edm(bad));
  const Matrix j = Matrix::Identity(3, 3) - Matrix::Constant(3, 3, 1.0 / 3.0);
  CHECK(sym_eig(SymMatrix(-j * bad * j / 2.0)).values(2) < -0.1);
}

TEST_CASE("profile of the triangle") {
  const EdmProfile p = profile(fixtures::example_triangle());
  CHECK(p.r == 2);
  Vector w(3);
  w << 0.5, -0.5, 0.5;
  CHECK((p.w - w).norm() < 1e-12);
  CHECK(p.unit_spherical);
  CHECK(*p.radius == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(p.z.has_value());
}

TEST_CASE("profile of the square") {
  const EdmProfile p = profile(fixtures::example_square());
  CHECK(p.r == 2);
  CHECK((p.w - Vector::Constant(4, 0.125)).norm() < 1e-12);
  CHECK(p.regular);
  CHECK(p.unit_spherical);
  CHECK(*p.radius == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(p.z.has_value());
  REQUIRE(p.z->cols() == 1);
  Vector z(4);
  z << 1, -1, 1, -1;
  CHECK(are_parallel(p.z->col(0), z, 1e-12));
  CHECK(p.center->norm() < 1e-12);
}

TEST_CASE("profile of random unit points spanning R^4") {
  std::mt19937_64 rng(99);
  const DistanceMatrix d = DistanceMatrix::from_matrix(fixtures::sqdist(fixtures::unit_points(5, 4, rng)));
  const EdmProfile p = profile(d);
  CHECK(p.r == 4);
  CHECK(std::abs(2.0 * p.w.sum() - 1.0) < 1e-10);
  CHECK(*p.radius == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("profile rejects non-EDMs") {
  Matrix bad(3, 3);
  bad << 0, 1, 9, 1, 0, 1, 9, 1, 0;
  try {
    profile(DistanceMatrix::from_matrix(bad));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAnEdm);
  }
}

TEST_CASE("gram choices") {
  CHECK(gram(DistanceMatrix::from_matrix(Matrix::Zero(3, 3)), GramChoice::Centroid).matrix().isZero(0.0));
  // Centroid Gram from explicit coordinates.
  const Matrix p = tetra_points();
  const Matrix centred = p.rowwise() - p.colwise().mean();
  const Matrix expect = centred * centred.transpose();
  CHECK((gram(fixtures::example_tetra(), GramChoice::Centroid).matrix() - expect).norm() < 1e-12);
  CHECK(expect(0, 0) == doctest::Approx(9.0 / 8.0));
  CHECK(expect(0, 1) == doctest::Approx(-7.0 / 8.0));
  CHECK((gram(fixtures::example_tetra(), GramChoice::WVector).matrix() - p * p.transpose()).norm() < 1e-12);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    InstanceSpec spec;
    spec.n = 3 + static_cast<int>(seed % 6);
    spec.r = 2 + static_cast<int>(seed % (spec.n - 2));
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    CHECK(rank_of(gram(d, GramChoice::Centroid)) == spec.r);
    CHECK(rank_of(gram(d, GramChoice::WVector)) == spec.r);
  }
}

TEST_CASE("pseudoinverse identities on the fixtures") {
  const DistanceMatrix sq = fixtures::example_square();
  const SymMatrix b = gram(sq, GramChoice::Centroid);
  CHECK(rel(bdag_identity(sq).matrix(), b.matrix() / 4.0) < 1e-12);

  const DistanceMatrix te = fixtures::example_tetra();
  const Matrix bd = bdag_identity(te).matrix();
  Vector row(4);
  row << 3, 1, -2, -2;
  CHECK((bd.row(0).transpose() - row / 4.0).norm() < 1e-12);
  CHECK(rel(bd, pinv(gram(te, GramChoice::Centroid)).matrix()) < 1e-12);

  // w_3 = w_4 = 0: the (3,4) block is shared by B^dag and B'^dag.
  const Matrix bp = bprime_dag_identity(te).matrix();
  CHECK(bp(2, 2) == doctest::Approx(bd(2, 2)));
  CHECK(bp(3, 3) == doctest::Approx(bd(3, 3)));
  CHECK(bp(2, 3) == doctest::Approx(bd(2, 3)));
  // w_1 = c w_2 with c = 1: quadratic forms agree on e^1 - e^2.
  Vector x = Vector::Zero(4);
  x(0) = 1;
  x(1) = -1;
  CHECK(x.dot(bp * x) == doctest::Approx(x.dot(bd * x)));

  const Matrix blk = cm_dag_block(sq).matrix();
  CHECK(blk(0, 0) == -2.0);
  CHECK((blk.row(0).tail(4).transpose() - Vector::Constant(4, 0.25)).norm() < 1e-12);

  Matrix off = sq.matrix();
  off(0, 1) = off(1, 0) = 2.5;
  CHECK_THROWS_AS(bdag_identity(DistanceMatrix::from_matrix(off)), Error);
}

TEST_CASE("pseudoinverse identities on generated instances") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    InstanceSpec spec;
    spec.n = 3 + static_cast<int>(seed % 6);
    spec.r = 2 + static_cast<int>((seed / 6) % (spec.n - 2));
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    const EdmProfile p = profile(d);
    CHECK(rel(bdag_identity(d).matrix(), pinv(p.b).matrix()) <= 1e-8);
    const SymMatrix bprime(Matrix::Ones(spec.n, spec.n) - d.matrix() / 2.0);
    CHECK(rel(bprime_dag_identity(d).matrix(), pinv(bprime).matrix()) <= 1e-8);
    CHECK(rel(cm_dag_block(d).matrix(), pinv(SymMatrix(bordered(d.matrix()))).matrix()) <= 1e-8);
  }
}

TEST_CASE("profile invariants on generated instances") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    InstanceSpec spec;
    spec.n = 3 + static_cast<int>(seed % 6);
    spec.r = 2 + static_cast<int>((seed / 6) % (spec.n - 2));
    spec.seed = seed;
    const DistanceMatrix d = gen_unit_spherical(spec);
    const EdmProfile p = profile(d);
    const int n = spec.n;
    const Vector e = Vector::Ones(n);
    CHECK(p.r == spec.r);
    CHECK((p.b.matrix() * e).norm() < 1e-10 * p.b.matrix().norm());
    CHECK(rel(p.b.matrix(), p.p * p.p.transpose()) < 1e-10);
    CHECK((d.matrix() * p.w - e).norm() < 1e-8);
    CHECK(rank_of(SymMatrix(d.matrix())) == p.r + 1);
    if (p.r <= n - 2) {
      // Z spans null(D).
      CHECK(p.z->cols() == n - p.r - 1);
      CHECK((d.matrix() * *p.z).norm() <= 1e-8 * d.matrix().norm());
      CHECK(nullspace_basis(d.matrix()).cols() == p.z->cols());
    }
    // Relabeling points.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix pd(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pd(i, j) = d.matrix()(perm[i], perm[j]);
    CHECK(profile(DistanceMatrix::from_matrix(pd)).r == p.r);
  }
}

TEST_CASE("regular instances satisfy w = e / (2 n rho^2)") {
  // Regular polygons and the square scaled to radius 2.
  for (int n : {3, 5, 6, 8}) {
    Matrix pts(n, 2);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = std::cos(2.0 * M_PI * i / n);
      pts(i, 1) = std::sin(2.0 * M_PI * i / n);
    }
    for (double s : {1.0, 4.0}) {
      const EdmProfile p = profile(DistanceMatrix::from_matrix(s * fixtures::sqdist(pts)));
      REQUIRE(p.regular);
      const double rho2 = *p.radius * *p.radius;
      CHECK(rho2 == doctest::Approx(s));
      CHECK((p.w - Vector::Constant(n, 1.0 / (2.0 * n * rho2))).norm() < 1e-9);
    }
  }
  CHECK_FALSE(profile(fixtures::example_triangle()).regular);
}

TEST_CASE("nonspherical instances have rank r + 2") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    const int r = 1 + static_cast<int>(seed % (n - 2));
    const DistanceMatrix d = gen_nonspherical(n, r, seed);
    const EdmProfile p = profile(d);
    CHECK(p.r == r);
    CHECK_FALSE(p.spherical);
    CHECK_FALSE(p.radius.has_value());
    CHECK(rank_of(SymMatrix(d.matrix())) == r + 2);
  }
}

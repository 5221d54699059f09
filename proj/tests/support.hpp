#pragma once

#include <cmath>
#include <random>

#include "edmp/edm.hpp"

namespace fixtures {

using edmp::DistanceMatrix;
using edmp::Matrix;
using edmp::Vector;

// Three points on a unit circle, n = 3, r = 2.
inline DistanceMatrix example_triangle() {
  Matrix d(3, 3);
  d << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  return DistanceMatrix::from_matrix(d);
}

// Square inscribed in the unit circle; regular, r = 2.
inline DistanceMatrix example_square() {
  Matrix d(4, 4);
  d << 0, 2, 4, 2, 2, 0, 2, 4, 4, 2, 0, 2, 2, 4, 2, 0;
  return DistanceMatrix::from_matrix(d);
}

// Four points in R^3 on the unit sphere, two of them antipodal.
inline DistanceMatrix example_tetra() {
  Matrix d(4, 4);
  d << 0, 4, 2, 2, 4, 0, 2, 2, 2, 2, 0, 2, 2, 2, 2, 0;
  return DistanceMatrix::from_matrix(d);
}

inline Matrix sqdist(const Matrix& p) {
  const Eigen::Index n = p.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (p.row(i) - p.row(j)).squaredNorm();
  return d;
}

// n unit vectors in R^dim with Gaussian directions.
inline Matrix unit_points(int n, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix p(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) p(i, j) = normal(rng);
    p.row(i).normalize();
  }
  return p;
}

inline double rel(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

}  // namespace fixtures

#pragma once

#include <cstdint>
#include <random>

#include "evodyn/simplex.hpp"

namespace evodyn::test {

// Uniform interior sample, kept away from the faces by `margin`.
inline Vector random_interior(std::mt19937_64& rng, Eigen::Index n, double margin = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = e(rng) + 1e-12;
  v /= v.sum();
  v = (1.0 - n * margin) * v + Vector::Constant(n, margin);
  return v / v.sum();
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace evodyn::test

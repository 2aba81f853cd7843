#include <doctest.h>

#include "evodyn/errors.hpp"
#include "evodyn/simplex.hpp"
#include "support.hpp"

using namespace evodyn;
using test::vec;

TEST_CASE("rsp_matrix layout") {
  const Matrix a = rsp_matrix(1, 2).entries();
  Matrix expected(3, 3);
  expected << 0, -2, 1, 1, 0, -2, -2, 1, 0;
  CHECK(a == expected);
  CHECK(rsp_matrix(0, 0).entries().isZero());
  Matrix neg(3, 3);
  neg << 0, 2, -1, -1, 0, 2, 2, -1, 0;
  CHECK(rsp_matrix(-1, -2).entries() == neg);
}

TEST_CASE("linear_fitness") {
  const SimplexPoint c = barycenter(3);
  CHECK(test::max_abs(linear_fitness(rsp_matrix(1, 2), c) - Vector::Constant(3, -1.0 / 3)) <
        1e-15);
  const SimplexPoint x(vec({0.2, 0.3, 0.5}));
  CHECK(linear_fitness(GameMatrix(Matrix::Identity(3, 3)), x) == x.coords());
  // Hand-computed product.
  const Vector f = linear_fitness(rsp_matrix(-1, -2), SimplexPoint(vec({0.1, 0.1, 0.8})));
  CHECK(test::max_abs(f - vec({-0.6, 1.5, 0.1})) < 1e-15);
  CHECK_THROWS_AS(linear_fitness(rsp_matrix(1, 2), barycenter(2)), DimensionError);
}

TEST_CASE("mean_fitness") {
  CHECK(mean_fitness(barycenter(3), Vector::Constant(3, -1.0 / 3)) ==
        doctest::Approx(-1.0 / 3).epsilon(1e-15));
  CHECK(mean_fitness(barycenter(4), Vector::Zero(4)) == 0.0);
  CHECK(mean_fitness(SimplexPoint::vertex(3, 0), vec({7, 1, 2})) == 7.0);
  CHECK_THROWS_AS(mean_fitness(barycenter(3), Vector::Zero(2)), DimensionError);
}

TEST_CASE("barycenter") {
  CHECK(barycenter(3).coords().isApprox(Vector::Constant(3, 1.0 / 3)));
  CHECK(barycenter(2).coords() == vec({0.5, 0.5}));
  CHECK(barycenter(4).coords() == Vector::Constant(4, 0.25));
  CHECK_THROWS_AS(barycenter(1), InvalidArgument);
}

TEST_CASE("SimplexPoint validates without renormalizing") {
  CHECK_NOTHROW(SimplexPoint(vec({1, 0, 0})));
  CHECK_NOTHROW(SimplexPoint(vec({0.5 + 5e-10, 0.5})));
  CHECK_THROWS_AS(SimplexPoint(vec({0.5, 0.6})), DomainError);
  CHECK_THROWS_AS(SimplexPoint(vec({1.1, -0.1})), DomainError);
  CHECK_THROWS_AS(SimplexPoint(vec({1.0})), InvalidArgument);
  CHECK_THROWS_AS(SimplexPoint(vec({std::nan(""), 1.0})), DomainError);
  const SimplexPoint p(vec({0.5 + 5e-10, 0.5}));
  CHECK(p[0] == 0.5 + 5e-10);
  CHECK_FALSE(SimplexPoint::vertex(3, 1).is_interior());
  CHECK(barycenter(3).is_interior());
}

TEST_CASE("GameMatrix rejects bad entries") {
  CHECK_THROWS(GameMatrix(Matrix::Zero(2, 3)));
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS(GameMatrix(m));
}

TEST_CASE("FitnessLandscape kinds") {
  const auto lin = FitnessLandscape::linear(rsp_matrix(1, 2));
  CHECK(lin.kind() == FitnessLandscape::Kind::kLinear);
  CHECK(lin.dimension() == 3);
  const auto c = FitnessLandscape::constant(vec({1, 2}));
  CHECK(c(barycenter(2)) == vec({1, 2}));
  CHECK_THROWS_AS(c.matrix(), UnsupportedKindError);
  const auto custom = FitnessLandscape::custom("square", 2, [](const Vector& x) {
    return Vector(x.array().square());
  });
  CHECK(custom(vec({0.5, 0.5})) == vec({0.25, 0.25}));
  const auto bad = FitnessLandscape::custom("short", 3, [](const Vector&) { return Vector(2); });
  CHECK_THROWS_AS(bad(barycenter(3)), DimensionError);
}

TEST_CASE("linear_fitness is affine on the simplex") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const GameMatrix a(test::random_matrix(rng, 4));
    const Vector x = test::random_interior(rng, 4);
    const Vector y = test::random_interior(rng, 4);
    const double t = u(rng);
    const Vector lhs = linear_fitness(a, SimplexPoint(t * x + (1 - t) * y));
    const Vector rhs =
        t * linear_fitness(a, SimplexPoint(x)) + (1 - t) * linear_fitness(a, SimplexPoint(y));
    CHECK(test::max_abs(lhs - rhs) < 1e-12);
    const SimplexPoint sx(x);
    CHECK(std::abs(mean_fitness(sx, linear_fitness(a, sx)) - x.dot(a.entries() * x)) < 1e-12);
  }
}

#include <doctest.h>

#include <cmath>

#include "evodyn/errors.hpp"
#include "evodyn/escort.hpp"
#include "support.hpp"

using namespace evodyn;
using test::vec;

namespace {

Escort custom_power(double q) {
  return Escort::custom("pow", [q](double u) { return std::pow(u, q); });
}

}  // namespace

TEST_CASE("escort_log closed forms") {
  CHECK(escort_log(Escort::power(2), 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  for (const Escort& e : {Escort::power(0.5), Escort::power(3), Escort::scaled(2),
                          Escort::constant_one(), custom_power(1.5)}) {
    CHECK(escort_log(e, 1.0) == doctest::Approx(0.0));
  }
  for (double x : {0.01, 0.3, 0.9}) {
    CHECK(escort_log(Escort::power(1), x) == doctest::Approx(std::log(x)).epsilon(1e-15));
    CHECK(escort_log(Escort::constant_one(), x) == doctest::Approx(x - 1));
    CHECK(escort_log(Escort::scaled(4), x) == doctest::Approx(std::log(x) / 4));
    // Quadrature path against the closed form.
    CHECK(std::abs(escort_log(custom_power(2.5), x) - escort_log(Escort::power(2.5), x)) < 1e-9);
  }
  CHECK_THROWS_AS(escort_log(Escort::power(1), 0.0), DomainError);
  CHECK_THROWS_AS(escort_log(Escort::power(2), -0.1), DomainError);
  // q < 1 extends to zero: (0 - 1) / (1 - q).
  CHECK(escort_log(Escort::power(0.5), 0.0) == doctest::Approx(-2.0));
}

TEST_CASE("escort_log is increasing and negative below one") {
  for (const Escort& e : {Escort::power(0), Escort::power(0.5), Escort::power(1),
                          Escort::power(2), Escort::power(4), Escort::scaled(0.3)}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 100; ++i) {
      const double v = escort_log(e, i / 100.0);
      CHECK(v > prev);
      CHECK(v < 0.0);
      prev = v;
    }
  }
}

TEST_CASE("escort_exp inverts escort_log") {
  CHECK(escort_exp(Escort::power(3), 0.0) == doctest::Approx(1.0));
  CHECK(escort_exp(Escort::power(1), 0.7) == doctest::Approx(std::exp(0.7)));
  CHECK(escort_exp(Escort::constant_one(), -0.25) == doctest::Approx(0.75));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.02, 1.0);
  for (const Escort& e : {Escort::power(0.5), Escort::power(1), Escort::power(2),
                          Escort::scaled(2), custom_power(1.5)}) {
    for (int i = 0; i < 50; ++i) {
      const double y = escort_log(e, u(rng));
      CHECK(std::abs(escort_log(e, escort_exp(e, y)) - y) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(escort_exp(Escort::power(2), 5.0), DomainError);
}

TEST_CASE("d/dy exp_phi(y) = phi(exp_phi(y))") {
  const double hstep = 1e-6;
  for (const Escort& e : {Escort::power(0.5), Escort::power(2), Escort::scaled(3)}) {
    for (double x : {0.2, 0.5, 0.8}) {
      const double y = escort_log(e, x);
      const double d = (escort_exp(e, y + hstep) - escort_exp(e, y - hstep)) / (2 * hstep);
      CHECK(d == doctest::Approx(e(x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("is_valid_escort") {
  CHECK(is_valid_escort(Escort::power(2)));
  CHECK(is_valid_escort(Escort::constant_one()));
  CHECK_FALSE(is_valid_escort(Escort::custom("decreasing", [](double u) { return 2 - u; })));
  CHECK_FALSE(is_valid_escort(Escort::custom("signed", [](double u) { return u - 0.5; })));
  CHECK_THROWS_AS(Escort::power(-1), InvalidArgument);
  CHECK_THROWS_AS(Escort::scaled(0), InvalidArgument);
}

TEST_CASE("escort_divergence examples") {
  const SimplexPoint x(vec({0.2, 0.3, 0.5}));
  const SimplexPoint y(vec({0.4, 0.4, 0.2}));
  CHECK(escort_divergence(Escort::power(2), x, x).value() == 0.0);
  CHECK(escort_divergence(Escort::constant_one(), x, y).value() ==
        doctest::Approx(0.5 * (x.coords() - y.coords()).squaredNorm()));
  const SimplexPoint a(vec({0.5, 0.5}));
  const SimplexPoint b(vec({0.25, 0.75}));
  CHECK(escort_divergence(Escort::power(1), a, b).value() ==
        doctest::Approx(0.14384103622589042).epsilon(1e-14));
  CHECK(kl_divergence(a, b).value() == doctest::Approx(0.14384103622589042).epsilon(1e-14));
}

TEST_CASE("q_divergence matches an independent oracle") {
  // mpmath evaluation of sum_i int_y^x (log_q u - log_q y) du.
  const SimplexPoint x(vec({0.2, 0.3, 0.5}));
  const SimplexPoint y(vec({0.4, 0.4, 0.2}));
  const std::pair<double, double> table[] = {
      {0.0, 0.07},
      {0.5, 0.12701947154407464},
      {1.0, 0.23321130808955418},
      {1.5, 0.43328438995191232},
      {2.0, 0.81453852113757119},
      {2.5, 1.5490689098647206},
      {4.0, 11.372685185185183},
  };
  for (auto [q, expected] : table) {
    CAPTURE(q);
    CHECK(q_divergence(q, x, y).value() == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK(q_divergence(0, SimplexPoint::vertex(3, 0), SimplexPoint::vertex(3, 1)).value() ==
        doctest::Approx(1.0));
  CHECK(q_divergence(1, x, x).value() == 0.0);
  CHECK_THROWS_AS(q_divergence(-0.5, x, y), InvalidArgument);
}

TEST_CASE("closed form agrees with quadrature") {
  std::mt19937_64 rng(21);
  for (double q : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 4.0}) {
    const EscortField quad(custom_power(q));
    for (int i = 0; i < 40; ++i) {
      const SimplexPoint x(test::random_interior(rng, 3, 0.01));
      const SimplexPoint y(test::random_interior(rng, 3, 0.01));
      CAPTURE(q);
      CHECK(std::abs(q_divergence(q, x, y).value() - escort_divergence(quad, x, y).value()) <=
            1e-8);
    }
  }
}

TEST_CASE("divergences are positive off the diagonal") {
  std::mt19937_64 rng(8);
  const std::vector<EscortField> fields = {
      EscortField(Escort::power(0)), EscortField(Escort::power(0.5)),
      EscortField(Escort::power(1)), EscortField(Escort::power(2)),
      EscortField(Escort::scaled(3)),
      EscortField(std::vector<Escort>{Escort::power(1), Escort::power(2), Escort::scaled(0.5)})};
  for (int i = 0; i < 1000; ++i) {
    const SimplexPoint x(test::random_interior(rng, 3));
    const SimplexPoint y(test::random_interior(rng, 3));
    for (const auto& f : fields) {
      CHECK(escort_divergence(f, x, y).value() > 0.0);
      CHECK(escort_divergence(f, x, x).value() == 0.0);
    }
  }
}

TEST_CASE("boundary behaviour") {
  const SimplexPoint edge(vec({0.0, 0.5, 0.5}));
  const SimplexPoint in(vec({0.2, 0.3, 0.5}));
  // KL to a point with a zero where the source is positive diverges.
  CHECK_THROWS_AS(kl_divergence(in, edge), DomainError);
  CHECK(std::isfinite(kl_divergence(edge, in).value()));
  CHECK(std::isfinite(q_divergence(0.5, in, edge).value()));
  CHECK_THROWS_AS(q_divergence(2, edge, in), DomainError);
}

TEST_CASE("DivergenceValue clamps rounding noise only") {
  CHECK(DivergenceValue(-1e-18).value() == 0.0);
  CHECK_THROWS_AS(DivergenceValue(-1e-3), DomainError);
  CHECK_THROWS_AS(DivergenceValue(std::nan("")), DomainError);
}

TEST_CASE("EscortField") {
  const EscortField per({Escort::power(1), Escort::constant_one()});
  CHECK_FALSE(per.is_shared());
  CHECK(per.evaluate(vec({0.25, 0.75})) == vec({0.25, 1.0}));
  CHECK(per.normalized(vec({0.25, 0.75})).isApprox(vec({0.2, 0.8})));
  CHECK_THROWS_AS(per.evaluate(vec({0.2, 0.3, 0.5})), DimensionError);
}

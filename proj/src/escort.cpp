#include "evodyn/escort.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

namespace {

constexpr double kQuadratureTol = 1e-10;
// Each panel reports at least 2 eps |K|, so large integrals cannot reach an
// absolute 1e-10; the target is floored at a few ulps of the value.
double quadrature_target(double value) {
  return std::max(kQuadratureTol, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
}
constexpr double kNegativeDivergenceSlack = 1e-12;

constexpr int kMaxPieces = 4000;

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

// One Gauss-Kronrod 31 panel. Boost's error estimate is in the units of
// [-1, 1], so the panel is mapped there first and the estimate is exact in scale.
template <class F>
Piece panel(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double s) { return half * f(mid + half * s); }, -1.0, 1.0, 0, 0.0, &error);
  return {a, b, value, error};
}

// Global adaptive bisection: always split the panel with the largest error.
template <class F>
double integrate(const F& f, double a, double b) {
  if (a == b) return 0.0;
  std::priority_queue<Piece> panels;
  panels.push(panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  while (std::isfinite(value) && error > quadrature_target(value) &&
         static_cast<int>(panels.size()) < kMaxPieces) {
    const Piece worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece left = panel(f, worst.a, mid);
    const Piece right = panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  if (!std::isfinite(value)) throw DomainError("escort integral diverges");
  // Re-add so the running sums do not carry cancellation from the updates.
  value = 0.0;
  error = 0.0;
  for (; !panels.empty(); panels.pop()) {
    value += panels.top().value;
    error += panels.top().error;
  }
  if (error > quadrature_target(value)) {
    throw DomainError(fmt::format(
        "escort quadrature on [{}, {}] did not converge (error {})", a, b, error));
  }
  return value;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(fmt::format("{} is not finite", what));
}

// int_y^x (x - v) / phi(v) dv == int_y^x [log(u) - log(y)] du
double quadrature_divergence(const Escort& phi, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw DomainError("custom escort divergence needs positive coordinates");
  }
  return integrate([&](double v) { return (x - v) / phi(v); }, y, x);
}

double power_divergence(double q, double x, double y) {
  if (q == 0.0) return 0.5 * (x - y) * (x - y);
  if (y < 0.0 || x < 0.0) {
    throw DomainError(fmt::format("q={} divergence at negative coordinate", q));
  }
  if (y == 0.0 && q >= 1.0) {
    throw DomainError(fmt::format("q={} divergence diverges at y_i = 0", q));
  }
  if (x == 0.0 && q >= 2.0) {
    throw DomainError(fmt::format("q={} divergence diverges at x_i = 0", q));
  }
  if (q == 1.0) {
    const double xlogx = x == 0.0 ? 0.0 : x * std::log(x / y);
    return xlogx - x + y;
  }
  if (q == 2.0) return (x - y) / y - std::log(x / y);
  const double a = 2.0 - q;
  const double b = 1.0 - q;
  return ((std::pow(x, a) - std::pow(y, a)) / a - std::pow(y, b) * (x - y)) / b;
}

}  // namespace

Escort Escort::power(double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw InvalidArgument(fmt::format("power escort needs q >= 0, got {}", q));
  }
  Escort e;
  e.kind_ = Kind::kPower;
  e.param_ = q;
  return e;
}

Escort Escort::scaled(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument(fmt::format("scaled escort needs beta > 0, got {}", beta));
  }
  Escort e;
  e.kind_ = Kind::kScaled;
  e.param_ = beta;
  return e;
}

Escort Escort::constant_one() { return Escort{}; }

Escort Escort::custom(std::string tag, Function fn) {
  if (!fn) throw InvalidArgument("custom escort needs a function");
  Escort e;
  e.kind_ = Kind::kCustom;
  e.tag_ = std::move(tag);
  e.fn_ = std::move(fn);
  return e;
}

bool Escort::is_unit() const {
  return kind_ == Kind::kConstantOne || (kind_ == Kind::kPower && param_ == 0.0);
}

double Escort::operator()(double x) const {
  switch (kind_) {
    case Kind::kPower:
      if (param_ == 0.0) return 1.0;
      if (param_ == 1.0) return x;
      return std::pow(x, param_);
    case Kind::kScaled:
      return param_ * x;
    case Kind::kConstantOne:
      return 1.0;
    case Kind::kCustom:
      return fn_(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

EscortField::EscortField(Escort shared) : components_{std::move(shared)} {}

EscortField::EscortField(std::vector<Escort> per_coordinate)
    : components_(std::move(per_coordinate)), shared_(false) {
  if (components_.empty()) throw InvalidArgument("escort field needs components");
}

const Escort& EscortField::operator[](Eigen::Index i) const {
  if (shared_) return components_.front();
  return components_.at(static_cast<std::size_t>(i));
}

Eigen::Index EscortField::size() const {
  return shared_ ? 0 : static_cast<Eigen::Index>(components_.size());
}

Vector EscortField::evaluate(const Vector& x) const {
  if (!shared_ && size() != x.size()) {
    throw DimensionError(fmt::format("escort field of size {} given state of size {}",
                                     size(), x.size()));
  }
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = (*this)[i](x[i]);
  return out;
}

Vector EscortField::normalized(const Vector& x) const {
  const Vector e = evaluate(x);
  const double total = e.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw GeometryError(fmt::format("escort vector sums to {}", total));
  }
  return e / total;
}

double escort_log(const Escort& phi, double x) {
  require_finite(x, "escort_log argument");
  if (phi.is_unit()) return x - 1.0;
  switch (phi.kind()) {
    case Escort::Kind::kPower: {
      const double q = phi.q();
      if (x < 0.0 || (x == 0.0 && q >= 1.0)) {
        throw DomainError(fmt::format("escort_log(q={}) undefined at {}", q, x));
      }
      if (q == 1.0) return std::log(x);
      if (x == 0.0) return -1.0 / (1.0 - q);
      return std::expm1((1.0 - q) * std::log(x)) / (1.0 - q);
    }
    case Escort::Kind::kScaled:
      if (!(x > 0.0)) throw DomainError("scaled escort_log needs x > 0");
      return std::log(x) / phi.beta();
    case Escort::Kind::kCustom:
      if (!(x > 0.0)) throw DomainError("custom escort_log needs x > 0");
      return integrate([&](double v) { return 1.0 / phi(v); }, 1.0, x);
    case Escort::Kind::kConstantOne:
      break;
  }
  return x - 1.0;
}

double escort_exp(const Escort& phi, double y) {
  require_finite(y, "escort_exp argument");
  if (phi.is_unit()) return y + 1.0;
  switch (phi.kind()) {
    case Escort::Kind::kPower: {
      const double q = phi.q();
      if (q == 1.0) return std::exp(y);
      const double base = 1.0 + (1.0 - q) * y;
      if (base < 0.0 || (base == 0.0 && q > 1.0)) {
        throw DomainError(fmt::format("{} is outside the range of log_q, q={}", y, q));
      }
      return std::exp(std::log1p((1.0 - q) * y) / (1.0 - q));
    }
    case Escort::Kind::kScaled:
      return std::exp(phi.beta() * y);
    case Escort::Kind::kCustom: {
      if (y == 0.0) return 1.0;
      const auto residual = [&](double x) { return escort_log(phi, x) - y; };
      double lo = 1.0;
      double hi = 1.0;
      if (y < 0.0) {
        while (residual(lo) > 0.0) {
          lo *= 0.5;
          if (lo < 1e-300) throw DomainError("escort_exp: value below the log range");
        }
      } else {
        while (residual(hi) < 0.0) {
          hi *= 2.0;
          if (hi > 1e12) throw DomainError("escort_exp: value above the log range");
        }
      }
      std::uintmax_t iterations = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          residual, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
      return 0.5 * (a + b);
    }
    case Escort::Kind::kConstantOne:
      break;
  }
  return y + 1.0;
}

bool is_valid_escort(const Escort& phi, int samples) {
  double previous = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double x = static_cast<double>(k) / samples;
    const double v = phi(x);
    if (!(v > 0.0) || !std::isfinite(v)) return false;
    if (v < previous) return false;
    previous = v;
  }
  return true;
}

DivergenceValue::DivergenceValue(double value) : value_(value) {
  if (std::isnan(value)) throw DomainError("divergence is NaN");
  if (value < 0.0) {
    if (value < -kNegativeDivergenceSlack) {
      throw DomainError(fmt::format("divergence evaluated to {}", value));
    }
    value_ = 0.0;
  }
}

double coordinate_escort_divergence(const Escort& phi, double x, double y) {
  require_finite(x, "divergence argument");
  require_finite(y, "divergence argument");
  if (x == y) return 0.0;
  if (phi.is_unit()) return 0.5 * (x - y) * (x - y);
  switch (phi.kind()) {
    case Escort::Kind::kPower:
      return power_divergence(phi.q(), x, y);
    case Escort::Kind::kScaled:
      return power_divergence(1.0, x, y) / phi.beta();
    case Escort::Kind::kCustom:
      return quadrature_divergence(phi, x, y);
    case Escort::Kind::kConstantOne:
      break;
  }
  return 0.5 * (x - y) * (x - y);
}

double escort_divergence(const EscortField& phi, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("divergence of unequal sizes");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total += coordinate_escort_divergence(phi[i], x[i], y[i]);
  }
  return total;
}

DivergenceValue escort_divergence(const EscortField& phi, const SimplexPoint& x,
                                  const SimplexPoint& y) {
  return DivergenceValue(escort_divergence(phi, x.coords(), y.coords()));
}

double q_divergence(double q, const Vector& x, const Vector& y) {
  if (!(q >= 0.0)) {
    throw InvalidArgument(fmt::format("q-divergence needs q >= 0, got {}", q));
  }
  if (x.size() != y.size()) throw DimensionError("divergence of unequal sizes");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) total += power_divergence(q, x[i], y[i]);
  }
  return total;
}

DivergenceValue q_divergence(double q, const SimplexPoint& x, const SimplexPoint& y) {
  return DivergenceValue(q_divergence(q, x.coords(), y.coords()));
}

double kl_divergence(const Vector& x, const Vector& y) { return q_divergence(1.0, x, y); }

DivergenceValue kl_divergence(const SimplexPoint& x, const SimplexPoint& y) {
  return DivergenceValue(kl_divergence(x.coords(), y.coords()));
}

}  // namespace evodyn

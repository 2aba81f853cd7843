#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evodyn/simplex.hpp"

namespace evodyn {

// An escort: a strictly positive, nondecreasing function on (0, 1].
//
// Built-in kinds have closed-form logarithms, exponentials and divergences;
// custom escorts go through adaptive quadrature and root finding.
class Escort {
 public:
  enum class Kind { kPower, kScaled, kConstantOne, kCustom };
  using Function = std::function<double(double)>;

  // x^q, q >= 0. power(1) is the Shahshahani escort, power(0) the Euclidean.
  static Escort power(double q);
  // beta x, beta > 0.
  static Escort scaled(double beta);
  static Escort constant_one();
  static Escort custom(std::string tag, Function fn);

  Kind kind() const { return kind_; }
  double q() const { return param_; }
  double beta() const { return param_; }
  const std::string& tag() const { return tag_; }

  double operator()(double x) const;

  // Power escorts with q == 0 and the constant escort: the unit escort,
  // whose logarithm x - 1 is extended to all reals.
  bool is_unit() const;

 private:
  Kind kind_ = Kind::kConstantOne;
  double param_ = 0.0;
  std::string tag_;
  Function fn_;
};

// One escort per coordinate, or a single escort shared by all coordinates.
class EscortField {
 public:
  EscortField(Escort shared);  // NOLINT(google-explicit-constructor)
  explicit EscortField(std::vector<Escort> per_coordinate);

  const Escort& operator[](Eigen::Index i) const;
  bool is_shared() const { return components_.size() == 1 && shared_; }
  // Number of per-coordinate escorts; 0 when shared.
  Eigen::Index size() const;

  // (phi_1(x_1), ..., phi_n(x_n))
  Vector evaluate(const Vector& x) const;
  // The escort vector normalized onto the simplex.
  Vector normalized(const Vector& x) const;

 private:
  std::vector<Escort> components_;
  bool shared_ = true;
};

// int_1^x du / phi(u)
double escort_log(const Escort& phi, double x);

// Functional inverse of escort_log.
double escort_exp(const Escort& phi, double y);

// Samples (0, 1] and checks positivity and monotonicity.
bool is_valid_escort(const Escort& phi, int samples = 1000);

// Information divergence; guaranteed >= 0.
class DivergenceValue {
 public:
  // Rounding-level negatives are clamped to zero; anything below that is a
  // DomainError.
  explicit DivergenceValue(double value);

  double value() const { return value_; }
  operator double() const { return value_; }  // NOLINT

 private:
  double value_;
};

// int_y^x [log_phi(u) - log_phi(y)] du for one coordinate.
double coordinate_escort_divergence(const Escort& phi, double x, double y);

// sum_i int_{y_i}^{x_i} [log_phi_i(u) - log_phi_i(y_i)] du
DivergenceValue escort_divergence(const EscortField& phi, const SimplexPoint& x,
                                  const SimplexPoint& y);
// Raw version for states that may sit off the simplex.
double escort_divergence(const EscortField& phi, const Vector& x, const Vector& y);

// Closed form of the power-escort divergence; q >= 0.
DivergenceValue q_divergence(double q, const SimplexPoint& x, const SimplexPoint& y);
double q_divergence(double q, const Vector& x, const Vector& y);

// sum_i x_i log(x_i / y_i) - x_i + y_i, i.e. KL on the simplex.
DivergenceValue kl_divergence(const SimplexPoint& x, const SimplexPoint& y);
double kl_divergence(const Vector& x, const Vector& y);

}  // namespace evodyn

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>

namespace evodyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultSimplexTol = 1e-9;

// A population state: nonnegative proportions summing to one.
//
// The constructor validates and never renormalizes. Coordinates exactly at
// zero are legal (boundary faces are states too).
class SimplexPoint {
 public:
  explicit SimplexPoint(Vector coords, double tol = kDefaultSimplexTol);

  static SimplexPoint vertex(Eigen::Index n, Eigen::Index k);

  const Vector& coords() const { return coords_; }
  Eigen::Index size() const { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }
  double tol() const { return tol_; }

  // True when every coordinate is strictly positive.
  bool is_interior() const;

  // Checks the invariants without throwing.
  static bool satisfies(const Vector& coords, double tol = kDefaultSimplexTol);

 private:
  Vector coords_;
  double tol_;
};

// Square payoff matrix with finite entries.
class GameMatrix {
 public:
  explicit GameMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// f(x): maps a state to a payoff per strategy.
class FitnessLandscape {
 public:
  enum class Kind { kLinear, kConstant, kCustom };
  using Evaluator = std::function<Vector(const Vector&)>;

  // Empty constant landscape; replace before use.
  FitnessLandscape() = default;

  static FitnessLandscape linear(GameMatrix a);
  static FitnessLandscape constant(Vector c);
  // `n` is the dimension the evaluator accepts and returns.
  static FitnessLandscape custom(std::string tag, Eigen::Index n, Evaluator fn);

  Kind kind() const { return kind_; }
  Eigen::Index dimension() const { return n_; }
  const std::string& tag() const { return tag_; }
  // Only meaningful for kLinear.
  const GameMatrix& matrix() const;
  // Only meaningful for kConstant.
  const Vector& constant_payoffs() const { return constant_; }

  // Accepts raw states (possibly off the simplex) of the right dimension.
  Vector operator()(const Vector& x) const;
  Vector operator()(const SimplexPoint& x) const { return (*this)(x.coords()); }

 private:
  Kind kind_ = Kind::kConstant;
  Eigen::Index n_ = 0;
  std::string tag_;
  std::optional<GameMatrix> game_;
  Vector constant_;
  Evaluator fn_;
};

// [[0,-b,a],[a,0,-b],[-b,a,0]]
GameMatrix rsp_matrix(double a, double b);

Vector linear_fitness(const GameMatrix& a, const SimplexPoint& x);

// sum_i x_i f_i
double mean_fitness(const SimplexPoint& x, const Vector& f);
double mean_fitness(const Vector& x, const Vector& f);

SimplexPoint barycenter(Eigen::Index n);

}  // namespace evodyn

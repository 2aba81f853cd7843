#pragma once

#include <optional>

#include "evodyn/escort.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

// A Riemannian metric field G(x) on the simplex.
class MetricField {
 public:
  enum class Kind { kShahshahani, kEuclidean, kDiagonalEscort, kConstant };

  // G_ii = 1 / x_i
  static MetricField shahshahani();
  // G = I
  static MetricField euclidean();
  // G_ii = 1 / phi_i(x_i)
  static MetricField diagonal_escort(EscortField phi);
  // G = M for a symmetric positive definite M.
  static MetricField constant(Matrix m);

  Kind kind() const { return kind_; }
  bool is_diagonal() const { return kind_ != Kind::kConstant; }

  // The escort behind a diagonal metric; shahshahani is power(1) and
  // euclidean is the unit escort.
  EscortField diagonal_escorts() const;
  // Only for kConstant.
  const Matrix& constant_matrix() const { return m_; }

  // G(x). Throws DomainError where a diagonal entry is infinite.
  Matrix evaluate(const Vector& x) const;

  // G(x)^{-1} 1. Closed form for diagonal kinds, so it stays finite on
  // boundary faces where G itself blows up.
  Vector inverse_ones(const Vector& x) const;

 private:
  Kind kind_ = Kind::kEuclidean;
  std::optional<EscortField> escorts_;
  Matrix m_;
};

// (G^{-1} 1) / sum_j (G^{-1} 1)_j. Throws GeometryError when the normalized
// vector has negative entries or G^{-1} 1 sums to zero.
Vector ghat(const MetricField& g, const Vector& x);
SimplexPoint ghat(const MetricField& g, const SimplexPoint& x);

// C = G^{-1} - g g^T / (g^T 1), g = G^{-1} 1. Rows sum to zero.
Matrix adaptive_coefficients(const MetricField& g, const SimplexPoint& x);

// int_1^x G_ij(v) dv, where G_ij is read as a function of one variable.
double metric_log(const MetricField& g, Eigen::Index i, Eigen::Index j, double x);

// sum_{i,j} int_{x_i}^{t_i} [(log G)_ij(v) - (log G)_ij(x_i)] dv
DivergenceValue metric_divergence(const MetricField& g, const SimplexPoint& target,
                                  const SimplexPoint& x);
double metric_divergence(const MetricField& g, const Vector& target, const Vector& x);

// The reciprocal of every component used by the divergence is an escort,
// checked by sampling (0, 1]. Off-diagonal zeros are skipped.
bool satisfies_escort_reciprocal(const MetricField& g, Eigen::Index n,
                                 int samples = 1000);

}  // namespace evodyn

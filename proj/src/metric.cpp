#include "evodyn/metric.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

namespace {

constexpr double kGhatNegativeTol = 1e-12;

}  // namespace

MetricField MetricField::shahshahani() {
  MetricField g;
  g.kind_ = Kind::kShahshahani;
  return g;
}

MetricField MetricField::euclidean() { return MetricField{}; }

MetricField MetricField::diagonal_escort(EscortField phi) {
  MetricField g;
  g.kind_ = Kind::kDiagonalEscort;
  g.escorts_ = std::move(phi);
  return g;
}

MetricField MetricField::constant(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw DimensionError("constant metric must be a square matrix of size >= 2");
  }
  if (!m.allFinite()) throw InvalidArgument("constant metric is not finite");
  if (!m.isApprox(m.transpose(), 1e-12)) {
    throw GeometryError("constant metric is not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw GeometryError("constant metric is not positive definite");
  }
  MetricField g;
  g.kind_ = Kind::kConstant;
  g.m_ = std::move(m);
  return g;
}

EscortField MetricField::diagonal_escorts() const {
  switch (kind_) {
    case Kind::kShahshahani:
      return EscortField(Escort::power(1.0));
    case Kind::kEuclidean:
      return EscortField(Escort::constant_one());
    case Kind::kDiagonalEscort:
      return *escorts_;
    case Kind::kConstant:
      break;
  }
  throw UnsupportedKindError("constant metric has no escort representation");
}

Matrix MetricField::evaluate(const Vector& x) const {
  const auto n = x.size();
  if (kind_ == Kind::kConstant) {
    if (m_.rows() != n) throw DimensionError("constant metric size mismatch");
    return m_;
  }
  if (kind_ == Kind::kEuclidean) return Matrix::Identity(n, n);
  const Vector e = diagonal_escorts().evaluate(x);
  if (!(e.minCoeff() > 0.0)) {
    throw DomainError("diagonal metric is infinite where the escort vanishes");
  }
  return e.cwiseInverse().asDiagonal();
}

Vector MetricField::inverse_ones(const Vector& x) const {
  const auto n = x.size();
  switch (kind_) {
    case Kind::kShahshahani:
      return x;
    case Kind::kEuclidean:
      return Vector::Ones(n);
    case Kind::kDiagonalEscort:
      return escorts_->evaluate(x);
    case Kind::kConstant: {
      if (m_.rows() != n) throw DimensionError("constant metric size mismatch");
      return m_.ldlt().solve(Vector::Ones(n));
    }
  }
  return Vector::Ones(n);
}

Vector ghat(const MetricField& g, const Vector& x) {
  const Vector v = g.inverse_ones(x);
  const double total = v.sum();
  if (!std::isfinite(total) || total == 0.0) {
    throw GeometryError(fmt::format("G^-1 1 sums to {}", total));
  }
  Vector out = v / total;
  if (out.minCoeff() < -kGhatNegativeTol) {
    throw GeometryError(
        fmt::format("normalized G^-1 1 has negative entry {}", out.minCoeff()));
  }
  return out;
}

SimplexPoint ghat(const MetricField& g, const SimplexPoint& x) {
  return SimplexPoint(ghat(g, x.coords()));
}

Matrix adaptive_coefficients(const MetricField& g, const SimplexPoint& x) {
  const Matrix gx = g.evaluate(x.coords());
  Eigen::FullPivLU<Matrix> lu(gx);
  if (!lu.isInvertible()) throw GeometryError("metric is singular");
  const Matrix inv = lu.inverse();
  const Vector ones = Vector::Ones(x.size());
  const Vector gv = inv * ones;
  return inv - gv * gv.transpose() / gv.dot(ones);
}

double metric_log(const MetricField& g, Eigen::Index i, Eigen::Index j, double x) {
  if (!std::isfinite(x)) throw DomainError("metric_log argument is not finite");
  if (g.kind() == MetricField::Kind::kConstant) {
    return g.constant_matrix()(i, j) * (x - 1.0);
  }
  if (i != j) return 0.0;
  const EscortField phi = g.diagonal_escorts();
  return escort_log(phi[i], x);
}

double metric_divergence(const MetricField& g, const Vector& target, const Vector& x) {
  if (target.size() != x.size()) throw DimensionError("divergence of unequal sizes");
  if (g.kind() == MetricField::Kind::kConstant) {
    const Matrix& m = g.constant_matrix();
    if (m.rows() != x.size()) throw DimensionError("constant metric size mismatch");
    // Each (log G)_ij is linear with slope M_ij, so row i integrates to
    // (t_i - x_i)^2 / 2 times the row sum.
    const Vector rows = m.rowwise().sum();
    return 0.5 * (target - x).array().square().matrix().dot(rows);
  }
  // The diagonal kinds coincide with the escort divergence of 1 / G_ii.
  return escort_divergence(g.diagonal_escorts(), target, x);
}

DivergenceValue metric_divergence(const MetricField& g, const SimplexPoint& target,
                                  const SimplexPoint& x) {
  return DivergenceValue(metric_divergence(g, target.coords(), x.coords()));
}

bool satisfies_escort_reciprocal(const MetricField& g, Eigen::Index n, int samples) {
  if (g.kind() == MetricField::Kind::kConstant) {
    // 1 / M_ij is a positive constant exactly when M_ij > 0; zero entries
    // contribute nothing to the divergence.
    const Matrix& m = g.constant_matrix();
    return (m.array() >= 0.0).all() && (m.diagonal().array() > 0.0).all();
  }
  const EscortField phi = g.diagonal_escorts();
  for (Eigen::Index i = 0; i < (phi.is_shared() ? 1 : n); ++i) {
    if (!is_valid_escort(phi[i], samples)) return false;
  }
  return true;
}

}  // namespace evodyn

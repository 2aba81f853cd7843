#include "evodyn/simplex.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

bool SimplexPoint::satisfies(const Vector& coords, double tol) {
  if (coords.size() < 2) return false;
  if (!coords.allFinite()) return false;
  if (coords.minCoeff() < -tol) return false;
  return std::abs(coords.sum() - 1.0) <= tol;
}

SimplexPoint::SimplexPoint(Vector coords, double tol)
    : coords_(std::move(coords)), tol_(tol) {
  if (coords_.size() < 2) {
    throw InvalidArgument(
        fmt::format("simplex point needs n >= 2, got {}", coords_.size()));
  }
  if (!(tol_ >= 0.0)) throw InvalidArgument("simplex tolerance must be >= 0");
  if (!coords_.allFinite()) {
    throw DomainError("simplex point has non-finite coordinates");
  }
  if (coords_.minCoeff() < -tol_) {
    throw DomainError(fmt::format("simplex point has coordinate {} below -tol",
                                  coords_.minCoeff()));
  }
  if (std::abs(coords_.sum() - 1.0) > tol_) {
    throw DomainError(
        fmt::format("simplex point coordinates sum to {}", coords_.sum()));
  }
}

SimplexPoint SimplexPoint::vertex(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k >= n) throw InvalidArgument("vertex index out of range");
  Vector e = Vector::Zero(n);
  e[k] = 1.0;
  return SimplexPoint(std::move(e));
}

bool SimplexPoint::is_interior() const { return coords_.minCoeff() > 0.0; }

GameMatrix::GameMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionError(fmt::format("game matrix must be square, got {}x{}",
                                     entries_.rows(), entries_.cols()));
  }
  if (entries_.rows() == 0) throw DimensionError("game matrix is empty");
  if (!entries_.allFinite()) {
    throw InvalidArgument("game matrix has non-finite entries");
  }
}

FitnessLandscape FitnessLandscape::linear(GameMatrix a) {
  FitnessLandscape f;
  f.kind_ = Kind::kLinear;
  f.n_ = a.size();
  f.game_ = std::move(a);
  return f;
}

FitnessLandscape FitnessLandscape::constant(Vector c) {
  if (!c.allFinite()) throw InvalidArgument("constant landscape is not finite");
  FitnessLandscape f;
  f.kind_ = Kind::kConstant;
  f.n_ = c.size();
  f.constant_ = std::move(c);
  return f;
}

FitnessLandscape FitnessLandscape::custom(std::string tag, Eigen::Index n,
                                          Evaluator fn) {
  if (!fn) throw InvalidArgument("custom landscape needs an evaluator");
  FitnessLandscape f;
  f.kind_ = Kind::kCustom;
  f.n_ = n;
  f.tag_ = std::move(tag);
  f.fn_ = std::move(fn);
  return f;
}

const GameMatrix& FitnessLandscape::matrix() const {
  if (kind_ != Kind::kLinear) {
    throw UnsupportedKindError("landscape is not linear");
  }
  return *game_;
}

Vector FitnessLandscape::operator()(const Vector& x) const {
  if (x.size() != n_) {
    throw DimensionError(fmt::format("landscape of dimension {} given state of size {}",
                                     n_, x.size()));
  }
  Vector out;
  switch (kind_) {
    case Kind::kLinear:
      out = game_->entries() * x;
      break;
    case Kind::kConstant:
      out = constant_;
      break;
    case Kind::kCustom:
      out = fn_(x);
      break;
  }
  if (out.size() != n_) {
    throw DimensionError(fmt::format("landscape '{}' returned {} payoffs for n={}",
                                     tag_, out.size(), n_));
  }
  return out;
}

GameMatrix rsp_matrix(double a, double b) {
  Matrix m(3, 3);
  m << 0.0, -b, a,
       a, 0.0, -b,
       -b, a, 0.0;
  return GameMatrix(std::move(m));
}

Vector linear_fitness(const GameMatrix& a, const SimplexPoint& x) {
  if (a.size() != x.size()) {
    throw DimensionError(fmt::format("matrix of size {} applied to state of size {}",
                                     a.size(), x.size()));
  }
  return a.entries() * x.coords();
}

double mean_fitness(const Vector& x, const Vector& f) {
  if (x.size() != f.size()) {
    throw DimensionError(
        fmt::format("state of size {} with {} payoffs", x.size(), f.size()));
  }
  return x.dot(f);
}

double mean_fitness(const SimplexPoint& x, const Vector& f) {
  return mean_fitness(x.coords(), f);
}

SimplexPoint barycenter(Eigen::Index n) {
  if (n < 2) throw InvalidArgument(fmt::format("barycenter needs n >= 2, got {}", n));
  return SimplexPoint(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

}  // namespace evodyn

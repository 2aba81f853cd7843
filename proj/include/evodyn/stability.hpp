#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evodyn/dynamics.hpp"
#include "evodyn/escort.hpp"
#include "evodyn/incentives.hpp"
#include "evodyn/metric.hpp"

namespace evodyn {

// (cand - x) . f(x)
double ess_check(const FitnessLandscape& f, const SimplexPoint& cand, const SimplexPoint& x);
double ess_check(const FitnessLandscape& f, const Vector& cand, const Vector& x);

// sum_i cand_i phi_i(x) / x_i - sum_i phi_i(x). x must be interior.
double iss_check(const IncentiveSpec& phi, const SimplexPoint& cand, const SimplexPoint& x);
double iss_check(const IncentiveSpec& phi, const Vector& cand, const Vector& x);

// sum_i (cand_i - x_i) phi_i(x) / escort_i(x_i)
double eiss_check(const IncentiveSpec& phi, const EscortField& escort,
                  const SimplexPoint& cand, const SimplexPoint& x);
double eiss_check(const IncentiveSpec& phi, const EscortField& escort, const Vector& cand,
                  const Vector& x);

// phi(x)^T G(x) (cand - x)
double g_iss_check(const IncentiveSpec& phi, const MetricField& g, const SimplexPoint& cand,
                   const SimplexPoint& x);
double g_iss_check(const IncentiveSpec& phi, const MetricField& g, const Vector& cand,
                   const Vector& x);

enum class Predicate { kEss, kIss, kEiss, kGIss };

const char* to_string(Predicate p);

// Margin of a predicate at a raw interior state; candidate fixed.
using MarginFunction = std::function<double(const Vector& x)>;

// Margin function for a predicate under a dynamic's incentive and geometry.
// EISS reads the escort of a diagonal geometry.
MarginFunction predicate_margin(Predicate p, const DynamicSpec& spec,
                                const SimplexPoint& cand);

struct StabilityReport {
  Predicate predicate = Predicate::kIss;
  Vector candidate;
  double radius = 0.1;
  int samples = 0;
  double fraction_satisfied = 0.0;
  double min_margin = 0.0;
};

struct NeighborhoodOptions {
  double radius = 0.1;
  int samples = 1000;
  std::uint64_t seed = 0;
};

// Uniform samples of the interior within `radius` (Euclidean) of cand.
std::vector<Vector> neighborhood_samples(const SimplexPoint& cand,
                                         const NeighborhoodOptions& options);

StabilityReport neighborhood_report(Predicate p, const MarginFunction& margin,
                                    const SimplexPoint& cand,
                                    const NeighborhoodOptions& options = {});

// A divergence D(target, x) to trace along trajectories.
struct DivergenceSpec {
  enum class Kind { kKl, kQ, kEscort, kMetric };
  Kind kind = Kind::kKl;
  double q = 1.0;
  std::optional<EscortField> escort;
  std::optional<MetricField> metric;

  static DivergenceSpec kl() { return {}; }
  static DivergenceSpec q_divergence(double q);
  static DivergenceSpec escort_divergence(EscortField phi);
  static DivergenceSpec metric_divergence(MetricField g);

  // "kl", "q2_divergence", "escort_divergence", "metric_divergence"
  std::string name() const;
  double operator()(const Vector& target, const Vector& x) const;
};

enum class Verdict { kMonotoneDecreasing, kLocallyDecreasing, kNonMonotone };

const char* to_string(Verdict v);

struct LyapunovOptions {
  double tol = 1e-10;
  // Share of the delta derivatives, counted from the end, that must be
  // nonpositive for the local verdict.
  double tail_fraction = 0.5;
};

struct LyapunovTrace {
  std::vector<double> times;
  std::vector<double> values;
  // (D_{k+1} - D_k) / (t_{k+1} - t_k)
  std::vector<double> delta_derivatives;
  // Samples where the divergence could not be evaluated (value NaN).
  std::vector<std::size_t> invalid_samples;
  std::vector<std::string> invalid_reasons;
  Verdict verdict = Verdict::kNonMonotone;

  // Interior local maxima of the values.
  std::size_t local_maxima() const;
};

Verdict classify_trace(const std::vector<double>& delta_derivatives,
                       const LyapunovOptions& options = {});

LyapunovTrace lyapunov_trace(const Trajectory& traj, const DivergenceSpec& divergence,
                             const SimplexPoint& target, const LyapunovOptions& options = {});

// L = sum_alpha D_alpha(target_alpha, x_alpha), sampled where every
// population has a sample at the same time (within time_tol).
LyapunovTrace combined_trace(const std::vector<Trajectory>& trajs,
                             const std::vector<DivergenceSpec>& divergences,
                             const std::vector<SimplexPoint>& targets,
                             const LyapunovOptions& options = {}, double time_tol = 1e-9);

struct ScanPoint {
  Vector x;
  double value = 0.0;
};

// Interior grid of resolution k: the k (k + 1) / 2 points (c + 1/n) / k for
// nonnegative integer c summing to k - 1 (n = 3), generalized to any n.
std::vector<Vector> interior_grid(Eigen::Index n, int resolution);

std::vector<ScanPoint> region_scan(const MarginFunction& margin, Eigen::Index n,
                                   int resolution);

struct IncentiveClassification {
  bool payoff_positive = true;
  bool weakly_payoff_positive = true;
  bool payoff_monotone = true;
  bool aggregate_monotone = true;
  std::optional<Vector> payoff_positive_counterexample;
  std::optional<Vector> weakly_payoff_positive_counterexample;
  std::optional<Vector> payoff_monotone_counterexample;
  std::optional<Vector> aggregate_monotone_counterexample;
  int samples = 0;
};

// Sampling falsifier for the payoff positivity and monotonicity classes,
// comparing g = phi / x with f at interior samples.
IncentiveClassification classify_incentive(const IncentiveSpec& phi,
                                           const FitnessLandscape& f, int samples = 10000,
                                           std::uint64_t seed = 0);

struct Convergence {
  bool converged = false;
  long step = -1;
  std::size_t index = 0;
};

// First sample within eps of target after which every sample stays within
// 2 eps.
Convergence convergence_detect(const Trajectory& traj, const SimplexPoint& target,
                               double eps);

// Both sides of the one-step divergence bound for x -> x_next:
// lhs = (D(t, x_next) - D(t, x)) / h,
// rhs = -sum_i (t_i - x_i)(x_next_i - x_i) / (h escort_i(x_i)).
struct BoundSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

BoundSides step_bound_sides(const EscortField& escort, const Vector& target, const Vector& x,
                       const Vector& x_next, double h);

}  // namespace evodyn

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evodyn/incentives.hpp"
#include "evodyn/metric.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

// The temporal domain of a dynamic: hZ, a variable step sequence h_k, or R
// approximated by a fixed-step integrator.
class TimeScale {
 public:
  enum class Kind { kUniform, kVariable, kContinuous };
  enum class Rule { kHarmonic, kGeometric, kExplicit };
  enum class Integrator { kEuler, kRk4 };

  static TimeScale uniform(double h);
  // h_k = 1 / (k + 1)
  static TimeScale harmonic();
  // h_k = r^k, r in (0, 1]
  static TimeScale geometric(double r);
  static TimeScale explicit_steps(std::vector<double> steps);
  static TimeScale continuous(double dt = 1e-3, Integrator integrator = Integrator::kRk4);

  Kind kind() const { return kind_; }
  Rule rule() const { return rule_; }
  Integrator integrator() const { return integrator_; }
  // h for uniform, r for geometric, dt for continuous.
  double parameter() const { return param_; }
  const std::vector<double>& steps() const { return steps_; }

  // Step size used to go from sample k to k + 1.
  double step_size(long k) const;
  // Largest number of steps the scale supports; explicit lists are finite.
  std::optional<long> capacity() const;

 private:
  Kind kind_ = Kind::kUniform;
  Rule rule_ = Rule::kHarmonic;
  Integrator integrator_ = Integrator::kRk4;
  double param_ = 0.01;
  std::vector<double> steps_;
};

const char* to_string(TimeScale::Integrator integrator);

enum class BoundaryPolicy { kRecordAndContinue, kClipRenormalize, kHalt };

const char* to_string(BoundaryPolicy policy);

// The triple (incentive, geometry, time scale), plus optional mutation.
struct DynamicSpec {
  IncentiveSpec incentive;
  MetricField geometry = MetricField::euclidean();
  TimeScale timescale = TimeScale::uniform(0.01);
  // Row-stochastic; mu_ij is the chance type i produces type j.
  std::optional<Matrix> mutation;
  BoundaryPolicy boundary_policy = BoundaryPolicy::kRecordAndContinue;

  // Checks parameters and, for n > 0, the dimensions of every part.
  void validate(Eigen::Index n = 0) const;
};

// x^Delta = phi - Ghat sum(phi), or mu^T phi - Ghat sum(phi) with mutation.
Vector dynamic_rhs(const DynamicSpec& spec, const Vector& x);

// One step of size h on a raw state. The result may leave the simplex.
Vector delta_step(const DynamicSpec& spec, const Vector& x, double h);
// Throws DomainError when the step leaves the simplex, unless the spec
// clips.
SimplexPoint delta_step(const DynamicSpec& spec, const SimplexPoint& x, double h);

// x'_i = x_i + h x_i (f_i - fbar) / fbar. Throws DomainError for fbar <= 0.
SimplexPoint ts_replicator_step(const FitnessLandscape& f, const SimplexPoint& x,
                                double h);

// x' = (1 - h) x + h BR(x)
SimplexPoint best_reply_step(const FitnessLandscape& f, const SimplexPoint& x, double h,
                             TieRule tie_rule = TieRule::kLowestIndex);

// (1 - eps) I + eps / (n - 1) (1 1^T - I)
Matrix uniform_mutation_matrix(Eigen::Index n, double eps);

struct Sample {
  long step = 0;
  double t = 0.0;
  Vector x;
};

struct TrajectoryEvent {
  enum class Kind { kNegativeCoordinate, kSumDrift, kClipped, kDomainError };
  long step = 0;
  Kind kind = Kind::kNegativeCoordinate;
  std::string detail;
};

const char* to_string(TrajectoryEvent::Kind kind);

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<TrajectoryEvent> events;
  DynamicSpec spec;
  // Stopped before the requested number of steps.
  bool truncated = false;
  std::optional<std::string> error;

  bool has_event(TrajectoryEvent::Kind kind) const;
  const Vector& final_state() const { return samples.back().x; }
};

Trajectory run_trajectory(const DynamicSpec& spec, const SimplexPoint& x0, long steps);

// Payoffs of population `alpha` given every population's state.
using CouplingFunction =
    std::function<Vector(std::size_t alpha, const std::vector<Vector>& states)>;

struct Coupling {
  std::string tag = "independent";
  // Empty for independent populations.
  CouplingFunction fitness;

  static Coupling independent() { return Coupling{}; }
  static Coupling custom(std::string tag, CouplingFunction fn);
  // Population alpha plays its own matrix against the state of population
  // alpha + 1 (cyclically).
  static Coupling cross(std::vector<FitnessLandscape> landscapes);

  bool is_independent() const { return !fitness; }
};

struct MultiPopSpec {
  std::vector<DynamicSpec> populations;
  Coupling coupling;

  void validate() const;
};

// Advances every population once, each with its own h_k.
std::vector<Vector> multipop_step(const MultiPopSpec& spec,
                                  const std::vector<Vector>& states, long k);
std::vector<SimplexPoint> multipop_step(const MultiPopSpec& spec,
                                        const std::vector<SimplexPoint>& states,
                                        long k);

// One trajectory per population. A population that fails stops on its own
// when independent; a coupled system stops as a whole.
std::vector<Trajectory> run_multipop(const MultiPopSpec& spec,
                                     const std::vector<SimplexPoint>& x0, long steps);

}  // namespace evodyn

#include "evodyn/dynamics.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

namespace {

constexpr double kStochasticTol = 1e-12;

void require_step(double h, const char* what) {
  if (!(h > 0.0 && h <= 1.0)) {
    throw InvalidArgument(fmt::format("{} must lie in (0, 1], got {}", what, h));
  }
}

Vector rhs_from_fitness(const DynamicSpec& spec, const Vector& x, const Vector& f) {
  const Vector phi = incentive_from_fitness(spec.incentive, x, f);
  const Vector g = ghat(spec.geometry, x);
  const double total = phi.sum();
  Vector out = spec.mutation ? Vector(spec.mutation->transpose() * phi) : phi;
  out -= g * total;
  if (!out.allFinite()) throw DomainError("vector field is not finite");
  return out;
}

using Field = std::function<Vector(const Vector&)>;

Vector advance(const TimeScale& ts, const Field& rhs, const Vector& x, double h) {
  if (ts.kind() == TimeScale::Kind::kContinuous &&
      ts.integrator() == TimeScale::Integrator::kRk4) {
    const Vector k1 = rhs(x);
    const Vector k2 = rhs(x + 0.5 * h * k1);
    const Vector k3 = rhs(x + 0.5 * h * k2);
    const Vector k4 = rhs(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x + h * rhs(x);
}

// Checks a fresh state against the simplex, records events and applies the
// boundary policy. Returns false when the state must not be kept.
bool screen_state(BoundaryPolicy policy, long step, Vector& x,
                  std::vector<TrajectoryEvent>& events) {
  if (!x.allFinite()) throw DomainError("state is not finite");
  bool outside = false;
  const double low = x.minCoeff();
  if (low < -kDefaultSimplexTol) {
    events.push_back({step, TrajectoryEvent::Kind::kNegativeCoordinate,
                      fmt::format("min coordinate {:.6e}", low)});
    outside = true;
  }
  const double drift = x.sum() - 1.0;
  if (std::abs(drift) > kDefaultSimplexTol) {
    events.push_back(
        {step, TrajectoryEvent::Kind::kSumDrift, fmt::format("sum drift {:.6e}", drift)});
    outside = true;
  }
  if (!outside) return true;
  switch (policy) {
    case BoundaryPolicy::kRecordAndContinue:
      return true;
    case BoundaryPolicy::kHalt:
      return false;
    case BoundaryPolicy::kClipRenormalize: {
      x = x.cwiseMax(0.0);
      const double total = x.sum();
      if (!(total > 0.0)) throw DomainError("clipped state has no mass");
      x /= total;
      events.push_back({step, TrajectoryEvent::Kind::kClipped, "clipped and renormalized"});
      return true;
    }
  }
  return true;
}

double next_time(const TimeScale& ts, long k, double t, double h) {
  // Uniform and continuous scales use exact multiples so that samples of
  // different populations can be matched.
  if (ts.kind() == TimeScale::Kind::kVariable) return t + h;
  return static_cast<double>(k + 1) * ts.parameter();
}

}  // namespace

TimeScale TimeScale::uniform(double h) {
  require_step(h, "uniform step h");
  TimeScale ts;
  ts.kind_ = Kind::kUniform;
  ts.param_ = h;
  return ts;
}

TimeScale TimeScale::harmonic() {
  TimeScale ts;
  ts.kind_ = Kind::kVariable;
  ts.rule_ = Rule::kHarmonic;
  ts.param_ = 0.0;
  return ts;
}

TimeScale TimeScale::geometric(double r) {
  require_step(r, "geometric ratio r");
  TimeScale ts;
  ts.kind_ = Kind::kVariable;
  ts.rule_ = Rule::kGeometric;
  ts.param_ = r;
  return ts;
}

TimeScale TimeScale::explicit_steps(std::vector<double> steps) {
  if (steps.empty()) throw InvalidArgument("explicit time scale needs steps");
  for (double h : steps) require_step(h, "explicit step");
  TimeScale ts;
  ts.kind_ = Kind::kVariable;
  ts.rule_ = Rule::kExplicit;
  ts.param_ = 0.0;
  ts.steps_ = std::move(steps);
  return ts;
}

TimeScale TimeScale::continuous(double dt, Integrator integrator) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument(fmt::format("continuous dt must be positive, got {}", dt));
  }
  TimeScale ts;
  ts.kind_ = Kind::kContinuous;
  ts.integrator_ = integrator;
  ts.param_ = dt;
  return ts;
}

double TimeScale::step_size(long k) const {
  if (k < 0) throw InvalidArgument("negative step index");
  switch (kind_) {
    case Kind::kUniform:
    case Kind::kContinuous:
      return param_;
    case Kind::kVariable:
      break;
  }
  switch (rule_) {
    case Rule::kHarmonic:
      return 1.0 / static_cast<double>(k + 1);
    case Rule::kGeometric: {
      const double h = std::pow(param_, static_cast<double>(k));
      if (!(h > 0.0)) throw DomainError("geometric step underflowed to zero");
      return h;
    }
    case Rule::kExplicit:
      if (static_cast<std::size_t>(k) >= steps_.size()) {
        throw InvalidArgument(
            fmt::format("explicit time scale has only {} steps", steps_.size()));
      }
      return steps_[static_cast<std::size_t>(k)];
  }
  return param_;
}

std::optional<long> TimeScale::capacity() const {
  if (kind_ == Kind::kVariable && rule_ == Rule::kExplicit) {
    return static_cast<long>(steps_.size());
  }
  return std::nullopt;
}

const char* to_string(TimeScale::Integrator integrator) {
  return integrator == TimeScale::Integrator::kEuler ? "euler" : "rk4";
}

const char* to_string(BoundaryPolicy policy) {
  switch (policy) {
    case BoundaryPolicy::kRecordAndContinue: return "record_and_continue";
    case BoundaryPolicy::kClipRenormalize: return "clip_renormalize";
    case BoundaryPolicy::kHalt: return "halt";
  }
  return "?";
}

const char* to_string(TrajectoryEvent::Kind kind) {
  switch (kind) {
    case TrajectoryEvent::Kind::kNegativeCoordinate: return "negative_coordinate";
    case TrajectoryEvent::Kind::kSumDrift: return "sum_drift";
    case TrajectoryEvent::Kind::kClipped: return "clipped";
    case TrajectoryEvent::Kind::kDomainError: return "domain_error";
  }
  return "?";
}

void DynamicSpec::validate(Eigen::Index n) const {
  incentive.validate();
  if (mutation) {
    const Matrix& mu = *mutation;
    if (mu.rows() != mu.cols()) throw DimensionError("mutation matrix is not square");
    if (!mu.allFinite() || mu.minCoeff() < 0.0) {
      throw InvalidArgument("mutation matrix needs finite nonnegative entries");
    }
    const Vector rows = mu.rowwise().sum();
    if ((rows.array() - 1.0).abs().maxCoeff() > kStochasticTol) {
      throw InvalidArgument("mutation matrix rows must sum to 1");
    }
    if (n > 0 && mu.rows() != n) throw DimensionError("mutation matrix size mismatch");
  }
  if (n > 0) {
    const Eigen::Index m = incentive.landscape.dimension();
    if (m != n) {
      throw DimensionError(fmt::format("landscape of dimension {} for n = {}", m, n));
    }
    if (geometry.kind() == MetricField::Kind::kConstant &&
        geometry.constant_matrix().rows() != n) {
      throw DimensionError("constant metric size mismatch");
    }
    if (geometry.kind() == MetricField::Kind::kDiagonalEscort) {
      const EscortField e = geometry.diagonal_escorts();
      if (!e.is_shared() && e.size() != n) {
        throw DimensionError("escort field size mismatch");
      }
    }
  }
}

Vector dynamic_rhs(const DynamicSpec& spec, const Vector& x) {
  return rhs_from_fitness(spec, x, spec.incentive.landscape(x));
}

Vector delta_step(const DynamicSpec& spec, const Vector& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
  return advance(spec.timescale, [&](const Vector& y) { return dynamic_rhs(spec, y); },
                 x, h);
}

SimplexPoint delta_step(const DynamicSpec& spec, const SimplexPoint& x, double h) {
  if (spec.timescale.kind() != TimeScale::Kind::kContinuous) require_step(h, "step h");
  Vector next = delta_step(spec, x.coords(), h);
  std::vector<TrajectoryEvent> events;
  if (!screen_state(spec.boundary_policy, 1, next, events) ||
      (!events.empty() && spec.boundary_policy != BoundaryPolicy::kClipRenormalize)) {
    throw DomainError(events.empty() ? "step left the simplex" : events.front().detail);
  }
  return SimplexPoint(std::move(next));
}

SimplexPoint ts_replicator_step(const FitnessLandscape& f, const SimplexPoint& x,
                                double h) {
  require_step(h, "step h");
  const Vector fx = f(x);
  const double fbar = mean_fitness(x, fx);
  if (!(fbar > 0.0)) {
    throw DomainError(fmt::format("time-scale replicator needs fbar > 0, got {}", fbar));
  }
  const Vector& v = x.coords();
  Vector next = v + h * v.cwiseProduct(((fx.array() - fbar) / fbar).matrix());
  return SimplexPoint(std::move(next));
}

SimplexPoint best_reply_step(const FitnessLandscape& f, const SimplexPoint& x, double h,
                             TieRule tie_rule) {
  require_step(h, "step h");
  const Vector br = best_reply_vector(f(x), tie_rule);
  if (h == 1.0) return SimplexPoint(br);
  return SimplexPoint((1.0 - h) * x.coords() + h * br);
}

Matrix uniform_mutation_matrix(Eigen::Index n, double eps) {
  if (n < 2) throw InvalidArgument("mutation matrix needs n >= 2");
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw InvalidArgument(fmt::format("mutation rate must lie in [0, 1], got {}", eps));
  }
  const double off = eps / static_cast<double>(n - 1);
  Matrix mu = Matrix::Constant(n, n, off);
  mu.diagonal().setConstant(1.0 - eps);
  // Rows must sum to exactly one in floating point. The last entry of a row
  // is added last, so it absorbs the rounding; that moves it by an ulp or two.
  // At eps = 1 the last row ends in a zero diagonal; use the entry before it.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i == n - 1 && mu(i, i) == 0.0) ? n - 2 : n - 1;
    for (int k = 0; k < 8 && mu.row(i).sum() != 1.0; ++k) {
      mu(i, j) = std::max(0.0, mu(i, j) + (1.0 - mu.row(i).sum()));
    }
  }
  return mu;
}

bool Trajectory::has_event(TrajectoryEvent::Kind kind) const {
  for (const auto& e : events) {
    if (e.kind == kind) return true;
  }
  return false;
}

Trajectory run_trajectory(const DynamicSpec& spec, const SimplexPoint& x0, long steps) {
  MultiPopSpec single{{spec}, Coupling::independent()};
  return std::move(run_multipop(single, {x0}, steps).front());
}

Coupling Coupling::custom(std::string tag, CouplingFunction fn) {
  if (!fn) throw InvalidArgument("custom coupling needs a function");
  return Coupling{std::move(tag), std::move(fn)};
}

Coupling Coupling::cross(std::vector<FitnessLandscape> landscapes) {
  auto fn = [ls = std::move(landscapes)](std::size_t alpha,
                                         const std::vector<Vector>& states) {
    const std::size_t other = (alpha + 1) % states.size();
    return ls.at(alpha)(states[other]);
  };
  return Coupling{"cross", std::move(fn)};
}

void MultiPopSpec::validate() const {
  if (populations.empty()) throw InvalidArgument("multi-population spec is empty");
  for (const auto& p : populations) p.validate();
  if (!coupling.is_independent()) {
    for (const auto& p : populations) {
      if (p.timescale.kind() == TimeScale::Kind::kContinuous) {
        throw UnsupportedKindError("coupled populations need discrete time scales");
      }
    }
  }
}

std::vector<Vector> multipop_step(const MultiPopSpec& spec,
                                  const std::vector<Vector>& states, long k) {
  if (states.size() != spec.populations.size()) {
    throw DimensionError("one state per population is required");
  }
  std::vector<Vector> next;
  next.reserve(states.size());
  for (std::size_t a = 0; a < states.size(); ++a) {
    const DynamicSpec& p = spec.populations[a];
    const double h = p.timescale.step_size(k);
    if (spec.coupling.is_independent()) {
      next.push_back(delta_step(p, states[a], h));
    } else {
      const Vector f = spec.coupling.fitness(a, states);
      next.push_back(states[a] + h * rhs_from_fitness(p, states[a], f));
    }
  }
  return next;
}

std::vector<SimplexPoint> multipop_step(const MultiPopSpec& spec,
                                        const std::vector<SimplexPoint>& states,
                                        long k) {
  std::vector<Vector> raw;
  raw.reserve(states.size());
  for (const auto& s : states) raw.push_back(s.coords());
  std::vector<SimplexPoint> out;
  out.reserve(states.size());
  auto next = multipop_step(spec, raw, k);
  for (std::size_t a = 0; a < next.size(); ++a) {
    std::vector<TrajectoryEvent> events;
    const BoundaryPolicy policy = spec.populations[a].boundary_policy;
    if (!screen_state(policy, k + 1, next[a], events) ||
        (!events.empty() && policy != BoundaryPolicy::kClipRenormalize)) {
      throw DomainError(fmt::format("population {} left the simplex", a));
    }
    out.emplace_back(std::move(next[a]));
  }
  return out;
}

std::vector<Trajectory> run_multipop(const MultiPopSpec& spec,
                                     const std::vector<SimplexPoint>& x0, long steps) {
  spec.validate();
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  if (x0.size() != spec.populations.size()) {
    throw DimensionError("one initial state per population is required");
  }
  const std::size_t count = x0.size();
  std::vector<Trajectory> out(count);
  std::vector<Vector> states(count);
  std::vector<double> times(count, 0.0);
  std::vector<bool> active(count, true);
  for (std::size_t a = 0; a < count; ++a) {
    spec.populations[a].validate(x0[a].size());
    const auto cap = spec.populations[a].timescale.capacity();
    if (cap && *cap < steps) {
      throw InvalidArgument(
          fmt::format("population {} time scale has only {} steps", a, *cap));
    }
    out[a].spec = spec.populations[a];
    out[a].samples.reserve(static_cast<std::size_t>(steps) + 1);
    out[a].samples.push_back({0, 0.0, x0[a].coords()});
    states[a] = x0[a].coords();
  }

  const bool coupled = !spec.coupling.is_independent();
  auto stop = [&](std::size_t a, long step, const std::string& why) {
    out[a].events.push_back({step, TrajectoryEvent::Kind::kDomainError, why});
    out[a].truncated = true;
    out[a].error = why;
    active[a] = false;
  };

  for (long k = 0; k < steps; ++k) {
    std::vector<Vector> next(count);
    for (std::size_t a = 0; a < count; ++a) {
      if (!active[a]) continue;
      const DynamicSpec& p = spec.populations[a];
      try {
        const double h = p.timescale.step_size(k);
        if (coupled) {
          const Vector f = spec.coupling.fitness(a, states);
          next[a] = states[a] + h * rhs_from_fitness(p, states[a], f);
        } else {
          next[a] = delta_step(p, states[a], h);
        }
      } catch (const Error& e) {
        stop(a, k + 1, e.what());
      }
    }
    for (std::size_t a = 0; a < count; ++a) {
      if (!active[a]) continue;
      const DynamicSpec& p = spec.populations[a];
      try {
        if (!screen_state(p.boundary_policy, k + 1, next[a], out[a].events)) {
          out[a].truncated = true;
          active[a] = false;
          continue;
        }
      } catch (const Error& e) {
        stop(a, k + 1, e.what());
        continue;
      }
      times[a] = next_time(p.timescale, k, times[a], p.timescale.step_size(k));
      states[a] = next[a];
      out[a].samples.push_back({k + 1, times[a], std::move(next[a])});
    }
    bool any = false;
    bool all = true;
    for (bool v : active) {
      any = any || v;
      all = all && v;
    }
    if (!any || (coupled && !all)) break;
  }
  if (coupled) {
    for (auto& t : out) {
      if (static_cast<long>(t.samples.size()) <= steps) t.truncated = true;
    }
  }
  return out;
}

}  // namespace evodyn

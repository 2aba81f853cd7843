#include "evodyn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_interior(const Vector& x, const char* what) {
  if (!(x.minCoeff() > 0.0)) {
    throw DomainError(fmt::format("{} needs a strictly interior state", what));
  }
}

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("states of different sizes");
}

// Strict comparison that treats rounding-level differences as ties.
bool greater(double a, double b) {
  return a - b > 1e-12 * (1.0 + std::abs(a) + std::abs(b));
}

Vector dirichlet_one(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double e = 0.0;
    while (!(e > 0.0)) e = expo(rng);
    v[i] = e;
  }
  return v / v.sum();
}

LyapunovTrace finish_trace(LyapunovTrace trace, const LyapunovOptions& options) {
  const std::size_t m = trace.values.size();
  trace.delta_derivatives.clear();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double dt = trace.times[k + 1] - trace.times[k];
    trace.delta_derivatives.push_back((trace.values[k + 1] - trace.values[k]) / dt);
  }
  trace.verdict = classify_trace(trace.delta_derivatives, options);
  return trace;
}

}  // namespace

double ess_check(const FitnessLandscape& f, const Vector& cand, const Vector& x) {
  require_same_size(cand, x);
  return (cand - x).dot(f(x));
}

double ess_check(const FitnessLandscape& f, const SimplexPoint& cand, const SimplexPoint& x) {
  return ess_check(f, cand.coords(), x.coords());
}

double iss_check(const IncentiveSpec& phi, const Vector& cand, const Vector& x) {
  require_same_size(cand, x);
  require_interior(x, "iss_check");
  const Vector p = evaluate_incentive(phi, x);
  return cand.dot(p.cwiseQuotient(x)) - p.sum();
}

double iss_check(const IncentiveSpec& phi, const SimplexPoint& cand, const SimplexPoint& x) {
  return iss_check(phi, cand.coords(), x.coords());
}

double eiss_check(const IncentiveSpec& phi, const EscortField& escort, const Vector& cand,
                  const Vector& x) {
  require_same_size(cand, x);
  const Vector e = escort.evaluate(x);
  if (!(e.minCoeff() > 0.0) || !e.allFinite()) {
    throw DomainError("eiss_check: escort must be positive at x");
  }
  const Vector p = evaluate_incentive(phi, x);
  return (cand - x).dot(p.cwiseQuotient(e));
}

double eiss_check(const IncentiveSpec& phi, const EscortField& escort,
                  const SimplexPoint& cand, const SimplexPoint& x) {
  return eiss_check(phi, escort, cand.coords(), x.coords());
}

double g_iss_check(const IncentiveSpec& phi, const MetricField& g, const Vector& cand,
                   const Vector& x) {
  require_same_size(cand, x);
  const Vector p = evaluate_incentive(phi, x);
  return p.dot(g.evaluate(x) * (cand - x));
}

double g_iss_check(const IncentiveSpec& phi, const MetricField& g, const SimplexPoint& cand,
                   const SimplexPoint& x) {
  return g_iss_check(phi, g, cand.coords(), x.coords());
}

const char* to_string(Predicate p) {
  switch (p) {
    case Predicate::kEss: return "ess";
    case Predicate::kIss: return "iss";
    case Predicate::kEiss: return "eiss";
    case Predicate::kGIss: return "giss";
  }
  return "?";
}

MarginFunction predicate_margin(Predicate p, const DynamicSpec& spec,
                                const SimplexPoint& cand) {
  const Vector c = cand.coords();
  switch (p) {
    case Predicate::kEss:
      return [c, f = spec.incentive.landscape](const Vector& x) { return ess_check(f, c, x); };
    case Predicate::kIss:
      return [c, phi = spec.incentive](const Vector& x) { return iss_check(phi, c, x); };
    case Predicate::kEiss: {
      const EscortField e = spec.geometry.diagonal_escorts();
      return [c, e, phi = spec.incentive](const Vector& x) {
        return eiss_check(phi, e, c, x);
      };
    }
    case Predicate::kGIss:
      return [c, g = spec.geometry, phi = spec.incentive](const Vector& x) {
        return g_iss_check(phi, g, c, x);
      };
  }
  throw InvalidArgument("unknown predicate");
}

std::vector<Vector> neighborhood_samples(const SimplexPoint& cand,
                                         const NeighborhoodOptions& options) {
  if (!(options.radius > 0.0)) throw InvalidArgument("neighborhood radius must be positive");
  if (options.samples < 1) throw InvalidArgument("neighborhood needs samples >= 1");
  const Eigen::Index n = cand.size();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector& c = cand.coords();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(options.samples));
  const long max_attempts = 1000L * options.samples;
  // Uniform in the (n - 1)-ball of the affine hull: restricting a uniform
  // simplex sample to the ball gives the same law.
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < options.samples;
       ++attempt) {
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = normal(rng);
    d.array() -= d.mean();
    const double norm = d.norm();
    if (!(norm > 0.0)) continue;
    const double r = options.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n - 1));
    Vector x = c + (r / norm) * d;
    if (x.minCoeff() > 0.0) out.push_back(std::move(x));
  }
  if (static_cast<int>(out.size()) < options.samples) {
    throw DomainError("neighborhood has too little interior to sample");
  }
  return out;
}

StabilityReport neighborhood_report(Predicate p, const MarginFunction& margin,
                                    const SimplexPoint& cand,
                                    const NeighborhoodOptions& options) {
  StabilityReport report;
  report.predicate = p;
  report.candidate = cand.coords();
  report.radius = options.radius;
  report.samples = options.samples;
  report.min_margin = std::numeric_limits<double>::infinity();
  int satisfied = 0;
  for (const Vector& x : neighborhood_samples(cand, options)) {
    const double m = margin(x);
    if (m > 0.0) ++satisfied;
    report.min_margin = std::min(report.min_margin, m);
  }
  report.fraction_satisfied = static_cast<double>(satisfied) / options.samples;
  return report;
}

DivergenceSpec DivergenceSpec::q_divergence(double q) {
  if (!(q >= 0.0)) throw InvalidArgument("q-divergence needs q >= 0");
  DivergenceSpec d;
  d.kind = Kind::kQ;
  d.q = q;
  return d;
}

DivergenceSpec DivergenceSpec::escort_divergence(EscortField phi) {
  DivergenceSpec d;
  d.kind = Kind::kEscort;
  d.escort = std::move(phi);
  return d;
}

DivergenceSpec DivergenceSpec::metric_divergence(MetricField g) {
  DivergenceSpec d;
  d.kind = Kind::kMetric;
  d.metric = std::move(g);
  return d;
}

std::string DivergenceSpec::name() const {
  switch (kind) {
    case Kind::kKl: return "kl";
    case Kind::kQ: return fmt::format("q{:g}_divergence", q);
    case Kind::kEscort: return "escort_divergence";
    case Kind::kMetric: return "metric_divergence";
  }
  return "?";
}

double DivergenceSpec::operator()(const Vector& target, const Vector& x) const {
  switch (kind) {
    case Kind::kKl: return kl_divergence(target, x);
    case Kind::kQ: return evodyn::q_divergence(q, target, x);
    case Kind::kEscort: return evodyn::escort_divergence(*escort, target, x);
    case Kind::kMetric: return evodyn::metric_divergence(*metric, target, x);
  }
  return kNaN;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kMonotoneDecreasing: return "monotone_decreasing";
    case Verdict::kLocallyDecreasing: return "locally_decreasing";
    case Verdict::kNonMonotone: return "non_monotone";
  }
  return "?";
}

std::size_t LyapunovTrace::local_maxima() const {
  std::size_t count = 0;
  int last = 0;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double d = values[k + 1] - values[k];
    const double scale = 1e-14 * std::max(1.0, std::abs(values[k]));
    if (std::isnan(d) || std::abs(d) <= scale) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (last == 1 && sign == -1) ++count;
    last = sign;
  }
  return count;
}

Verdict classify_trace(const std::vector<double>& delta_derivatives,
                       const LyapunovOptions& options) {
  const auto ok = [&](double d) { return d <= options.tol; };  // NaN fails
  if (std::all_of(delta_derivatives.begin(), delta_derivatives.end(), ok)) {
    return Verdict::kMonotoneDecreasing;
  }
  const auto m = delta_derivatives.size();
  const auto tail = static_cast<std::size_t>(
      std::ceil(std::clamp(options.tail_fraction, 0.0, 1.0) * static_cast<double>(m)));
  if (std::all_of(delta_derivatives.end() - static_cast<std::ptrdiff_t>(tail),
                  delta_derivatives.end(), ok)) {
    return Verdict::kLocallyDecreasing;
  }
  return Verdict::kNonMonotone;
}

LyapunovTrace lyapunov_trace(const Trajectory& traj, const DivergenceSpec& divergence,
                             const SimplexPoint& target, const LyapunovOptions& options) {
  LyapunovTrace trace;
  trace.times.reserve(traj.samples.size());
  trace.values.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const Sample& s = traj.samples[k];
    trace.times.push_back(s.t);
    try {
      trace.values.push_back(divergence(target.coords(), s.x));
    } catch (const Error& e) {
      trace.values.push_back(kNaN);
      trace.invalid_samples.push_back(k);
      trace.invalid_reasons.emplace_back(e.what());
    }
  }
  return finish_trace(std::move(trace), options);
}

LyapunovTrace combined_trace(const std::vector<Trajectory>& trajs,
                             const std::vector<DivergenceSpec>& divergences,
                             const std::vector<SimplexPoint>& targets,
                             const LyapunovOptions& options, double time_tol) {
  if (trajs.empty()) throw InvalidArgument("combined trace needs trajectories");
  if (divergences.size() != trajs.size() || targets.size() != trajs.size()) {
    throw DimensionError("one divergence and target per population is required");
  }
  std::vector<LyapunovTrace> parts;
  parts.reserve(trajs.size());
  for (std::size_t a = 0; a < trajs.size(); ++a) {
    parts.push_back(lyapunov_trace(trajs[a], divergences[a], targets[a], options));
  }
  LyapunovTrace out;
  std::vector<std::size_t> cursor(trajs.size(), 0);
  for (std::size_t k = 0; k < parts[0].times.size(); ++k) {
    const double t = parts[0].times[k];
    double total = parts[0].values[k];
    bool matched = true;
    for (std::size_t a = 1; a < parts.size() && matched; ++a) {
      const auto& times = parts[a].times;
      auto& c = cursor[a];
      while (c < times.size() && times[c] < t - time_tol) ++c;
      if (c < times.size() && std::abs(times[c] - t) <= time_tol) {
        total += parts[a].values[c];
      } else {
        matched = false;
      }
    }
    if (!matched) continue;
    if (std::isnan(total)) out.invalid_samples.push_back(out.values.size());
    out.times.push_back(t);
    out.values.push_back(total);
  }
  return finish_trace(std::move(out), options);
}

std::vector<Vector> interior_grid(Eigen::Index n, int resolution) {
  if (n < 2) throw InvalidArgument("grid needs n >= 2");
  if (resolution < 2) throw InvalidArgument("scan resolution must be >= 2");
  std::vector<Vector> out;
  const int total = resolution - 1;
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  const double shift = 1.0 / static_cast<double>(n);
  // Enumerate compositions of `total` into n parts in lexicographic order.
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index i, int left) {
    if (i == n - 1) {
      c[static_cast<std::size_t>(i)] = left;
      Vector x(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        x[j] = (c[static_cast<std::size_t>(j)] + shift) / resolution;
      }
      out.push_back(std::move(x));
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[static_cast<std::size_t>(i)] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, total);
  return out;
}

std::vector<ScanPoint> region_scan(const MarginFunction& margin, Eigen::Index n,
                                   int resolution) {
  std::vector<ScanPoint> out;
  for (Vector& x : interior_grid(n, resolution)) {
    const double v = margin(x);
    out.push_back({std::move(x), v});
  }
  return out;
}

IncentiveClassification classify_incentive(const IncentiveSpec& phi,
                                           const FitnessLandscape& f, int samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("classification needs samples >= 1");
  IncentiveClassification out;
  out.samples = samples;
  IncentiveSpec spec = phi;
  spec.landscape = f;
  const Eigen::Index n = f.dimension();
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector x = dirichlet_one(n, rng);
    const Vector fx = f(x);
    const double fbar = x.dot(fx);
    // The zero-sum representative carries the growth rates.
    const Vector p = evaluate_incentive(spec, x);
    const Vector g = (p - x * p.sum()).cwiseQuotient(x);

    if (out.payoff_positive) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (greater(g[i], 0.0) != greater(fx[i], fbar)) {
          out.payoff_positive = false;
          out.payoff_positive_counterexample = x;
          break;
        }
      }
    }
    if (out.weakly_payoff_positive) {
      bool above = false;
      bool rewarded = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (greater(fx[i], fbar)) {
          above = true;
          if (greater(g[i], 0.0)) rewarded = true;
        }
      }
      if (above && !rewarded) {
        out.weakly_payoff_positive = false;
        out.weakly_payoff_positive_counterexample = x;
      }
    }
    if (out.payoff_monotone) {
      for (Eigen::Index i = 0; i < n && out.payoff_monotone; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (i != j && greater(fx[i], fx[j]) != greater(g[i], g[j])) {
            out.payoff_monotone = false;
            out.payoff_monotone_counterexample = x;
            break;
          }
        }
      }
    }
    if (out.aggregate_monotone) {
      const Vector y = dirichlet_one(n, rng);
      const Vector z = dirichlet_one(n, rng);
      if (greater(y.dot(fx), z.dot(fx)) != greater(y.dot(g), z.dot(g)) ||
          greater(z.dot(fx), y.dot(fx)) != greater(z.dot(g), y.dot(g))) {
        out.aggregate_monotone = false;
        out.aggregate_monotone_counterexample = x;
      }
    }
  }
  return out;
}

Convergence convergence_detect(const Trajectory& traj, const SimplexPoint& target,
                               double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("convergence tolerance must be positive");
  const auto& s = traj.samples;
  std::size_t first_good = s.size();
  // Walk backwards: every sample after the candidate must stay within 2 eps.
  for (std::size_t k = s.size(); k-- > 0;) {
    const double d = (s[k].x - target.coords()).norm();
    if (!(d <= 2.0 * eps)) break;
    if (d <= eps) first_good = k;
  }
  if (first_good == s.size()) return {};
  return {true, s[first_good].step, first_good};
}

BoundSides step_bound_sides(const EscortField& escort, const Vector& target, const Vector& x,
                       const Vector& x_next, double h) {
  const double d0 = escort_divergence(escort, target, x);
  const double d1 = escort_divergence(escort, target, x_next);
  const Vector e = escort.evaluate(x);
  BoundSides out;
  out.lhs = (d1 - d0) / h;
  out.rhs = -((target - x).cwiseProduct(x_next - x).cwiseQuotient(e)).sum() / h;
  return out;
}

}  // namespace evodyn

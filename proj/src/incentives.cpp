#include "evodyn/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "evodyn/errors.hpp"

namespace evodyn {

namespace {

IncentiveSpec make(IncentiveKind kind, FitnessLandscape f) {
  IncentiveSpec s{kind, std::move(f)};
  return s;
}

Vector softmax(const Vector& v) {
  const double m = v.maxCoeff();
  Vector e = (v.array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace

IncentiveSpec IncentiveSpec::replicator(FitnessLandscape f) {
  return make(IncentiveKind::kReplicator, std::move(f));
}

IncentiveSpec IncentiveSpec::q_replicator(FitnessLandscape f, double q) {
  IncentiveSpec s = make(IncentiveKind::kQReplicator, std::move(f));
  s.q = q;
  s.validate();
  return s;
}

IncentiveSpec IncentiveSpec::best_reply(FitnessLandscape f, TieRule tie) {
  IncentiveSpec s = make(IncentiveKind::kBestReply, std::move(f));
  s.tie_rule = tie;
  return s;
}

IncentiveSpec IncentiveSpec::logit(FitnessLandscape f, double eta) {
  IncentiveSpec s = make(IncentiveKind::kLogit, std::move(f));
  s.eta = eta;
  s.validate();
  return s;
}

IncentiveSpec IncentiveSpec::projection(FitnessLandscape f) {
  return make(IncentiveKind::kProjection, std::move(f));
}

IncentiveSpec IncentiveSpec::fitness_only(FitnessLandscape f) {
  return make(IncentiveKind::kFitnessOnly, std::move(f));
}

IncentiveSpec IncentiveSpec::ts_replicator(FitnessLandscape f) {
  return make(IncentiveKind::kTsReplicator, std::move(f));
}

void IncentiveSpec::validate() const {
  if (kind == IncentiveKind::kQReplicator && !(q >= 0.0 && std::isfinite(q))) {
    throw InvalidArgument(fmt::format("q-replicator needs q >= 0, got {}", q));
  }
  if (kind == IncentiveKind::kLogit && !(eta > 0.0 && std::isfinite(eta))) {
    throw InvalidArgument(fmt::format("logit needs eta > 0, got {}", eta));
  }
}

const char* to_string(IncentiveKind kind) {
  switch (kind) {
    case IncentiveKind::kReplicator: return "replicator";
    case IncentiveKind::kQReplicator: return "q_replicator";
    case IncentiveKind::kBestReply: return "best_reply";
    case IncentiveKind::kLogit: return "logit";
    case IncentiveKind::kProjection: return "projection";
    case IncentiveKind::kFitnessOnly: return "fitness_only";
    case IncentiveKind::kTsReplicator: return "ts_replicator";
  }
  return "?";
}

const char* to_string(TieRule rule) {
  return rule == TieRule::kLowestIndex ? "lowest_index" : "uniform_mix";
}

Vector best_reply_vector(const Vector& f, TieRule tie_rule) {
  if (f.size() == 0) throw DimensionError("best reply of an empty payoff vector");
  if (!f.allFinite()) throw EvaluationError("best reply of non-finite payoffs");
  const double best = f.maxCoeff();
  Vector br = Vector::Zero(f.size());
  if (tie_rule == TieRule::kLowestIndex) {
    Eigen::Index k = 0;
    f.maxCoeff(&k);
    br[k] = 1.0;
    return br;
  }
  double count = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] == best) {
      br[i] = 1.0;
      count += 1.0;
    }
  }
  return br / count;
}

SimplexPoint best_reply(const SimplexPoint& x, const Vector& f, TieRule tie_rule) {
  if (x.size() != f.size()) {
    throw DimensionError("best reply: state and payoff sizes differ");
  }
  return SimplexPoint(best_reply_vector(f, tie_rule));
}

std::vector<bool> projection_support(const Vector& x, const Vector& f) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<bool> in(n, false);
  double sum = 0.0;
  double count = 0.0;
  std::vector<Eigen::Index> outside;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      in[static_cast<std::size_t>(i)] = true;
      sum += f[i];
      count += 1.0;
    } else {
      outside.push_back(i);
    }
  }
  std::stable_sort(outside.begin(), outside.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return f[a] > f[b]; });
  for (Eigen::Index j : outside) {
    // Including j raises the average exactly when f_j exceeds it.
    if (count > 0.0 && f[j] <= sum / count) break;
    in[static_cast<std::size_t>(j)] = true;
    sum += f[j];
    count += 1.0;
  }
  return in;
}

Vector incentive_from_fitness(const IncentiveSpec& spec, const Vector& x,
                              const Vector& f) {
  if (x.size() != f.size()) {
    throw DimensionError(fmt::format("incentive: state of size {} with {} payoffs",
                                     x.size(), f.size()));
  }
  if (!f.allFinite()) throw EvaluationError("incentive: payoffs are not finite");
  Vector phi;
  switch (spec.kind) {
    case IncentiveKind::kReplicator: {
      const double fbar = x.dot(f);
      phi = x.cwiseProduct((f.array() - fbar).matrix());
      break;
    }
    case IncentiveKind::kQReplicator:
      phi = x.array().pow(spec.q).matrix().cwiseProduct(f);
      break;
    case IncentiveKind::kBestReply:
      phi = best_reply_vector(f, spec.tie_rule) - x;
      break;
    case IncentiveKind::kLogit:
      if (!(spec.eta > 0.0)) throw InvalidArgument("logit needs eta > 0");
      phi = softmax(f / spec.eta);
      break;
    case IncentiveKind::kProjection: {
      const auto in = projection_support(x, f);
      double sum = 0.0;
      double count = 0.0;
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (in[static_cast<std::size_t>(i)]) {
          sum += f[i];
          count += 1.0;
        }
      }
      const double avg = sum / count;
      phi = Vector::Zero(f.size());
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (in[static_cast<std::size_t>(i)]) phi[i] = f[i] - avg;
      }
      break;
    }
    case IncentiveKind::kFitnessOnly:
      phi = f;
      break;
    case IncentiveKind::kTsReplicator: {
      const double fbar = x.dot(f);
      if (!(fbar > 0.0)) {
        throw DomainError(fmt::format(
            "time-scale replicator needs positive mean fitness, got {}", fbar));
      }
      phi = x.cwiseProduct(((f.array() - fbar) / fbar).matrix());
      break;
    }
  }
  if (spec.offspring_share) phi += x;
  if (!phi.allFinite()) {
    throw EvaluationError(fmt::format("{} incentive is not finite at this state",
                                      to_string(spec.kind)));
  }
  return phi;
}

Vector evaluate_incentive(const IncentiveSpec& spec, const Vector& x) {
  return incentive_from_fitness(spec, x, spec.landscape(x));
}

Vector evaluate_incentive(const IncentiveSpec& spec, const SimplexPoint& x) {
  return evaluate_incentive(spec, x.coords());
}

Vector effective_landscape(const IncentiveSpec& spec, const SimplexPoint& x) {
  if (!x.is_interior()) {
    throw DomainError("effective landscape is undefined on the simplex boundary");
  }
  return evaluate_incentive(spec, x).cwiseQuotient(x.coords());
}

Vector zero_sum_reduce(const IncentiveSpec& spec, const SimplexPoint& x) {
  const Vector phi = evaluate_incentive(spec, x);
  return phi - x.coords() * phi.sum();
}

}  // namespace evodyn

#pragma once

#include <vector>

#include "evodyn/simplex.hpp"

namespace evodyn {

enum class IncentiveKind {
  kReplicator,    // x_i (f_i - fbar)
  kQReplicator,   // x_i^q f_i
  kBestReply,     // BR_i(x) - x_i
  kLogit,         // softmax(f / eta)
  kProjection,    // f_i - mean_S f on the support set S, 0 off S
  kFitnessOnly,   // f_i
  kTsReplicator,  // x_i (f_i - fbar) / fbar
};

enum class TieRule { kLowestIndex, kUniformMix };

// The selection rule phi of an incentive dynamic, bound to a landscape.
struct IncentiveSpec {
  IncentiveKind kind = IncentiveKind::kReplicator;
  FitnessLandscape landscape;
  double q = 1.0;    // kQReplicator
  double eta = 1.0;  // kLogit
  TieRule tie_rule = TieRule::kLowestIndex;
  // Adds x to phi. Zero-sum kinds become their offspring-share
  // representative (BR for best reply, x f / fbar for the ts replicator);
  // only the mutator dynamic and non-shahshahani geometries can tell them
  // apart.
  bool offspring_share = false;

  static IncentiveSpec replicator(FitnessLandscape f);
  static IncentiveSpec q_replicator(FitnessLandscape f, double q);
  static IncentiveSpec best_reply(FitnessLandscape f,
                                  TieRule tie = TieRule::kLowestIndex);
  static IncentiveSpec logit(FitnessLandscape f, double eta);
  static IncentiveSpec projection(FitnessLandscape f);
  static IncentiveSpec fitness_only(FitnessLandscape f);
  static IncentiveSpec ts_replicator(FitnessLandscape f);

  // Throws InvalidArgument on q < 0 or eta <= 0.
  void validate() const;
};

const char* to_string(IncentiveKind kind);
const char* to_string(TieRule rule);

// phi(x) for a precomputed payoff vector f. Raw states are accepted so that
// trajectories which have left the simplex can still be stepped; the result
// is checked for finiteness.
Vector incentive_from_fitness(const IncentiveSpec& spec, const Vector& x,
                              const Vector& f);

Vector evaluate_incentive(const IncentiveSpec& spec, const Vector& x);
Vector evaluate_incentive(const IncentiveSpec& spec, const SimplexPoint& x);

// Vertex of the argmax of f, or the uniform mixture over the argmax set.
Vector best_reply_vector(const Vector& f, TieRule tie_rule = TieRule::kLowestIndex);
SimplexPoint best_reply(const SimplexPoint& x, const Vector& f,
                        TieRule tie_rule = TieRule::kLowestIndex);

// S(f, x): the support of x plus the pure strategies outside it that raise
// the average of f over the set. Returned as a membership mask.
std::vector<bool> projection_support(const Vector& x, const Vector& f);

// phi_i(x) / x_i. Requires a strictly interior state.
Vector effective_landscape(const IncentiveSpec& spec, const SimplexPoint& x);

// phi(x) - x sum_j phi_j(x); always sums to zero on the simplex.
Vector zero_sum_reduce(const IncentiveSpec& spec, const SimplexPoint& x);

}  // namespace evodyn

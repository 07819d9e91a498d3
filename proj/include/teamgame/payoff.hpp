#pragma once

// Behavioral profiles, pure plans, and expected payoffs by one pre-order pass.

#include "teamgame/infosets.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace teamgame {

/** Per-infoset action distributions, indexed by infoset id. */
template <typename Scalar>
struct BasicProfile {
  std::vector<std::vector<Scalar>> probs;
  bool average = false;
};
using BehavioralProfile = BasicProfile<double>;
using ExactProfile = BasicProfile<Rational>;

/**
 * A pure (reduced) plan: one action index per infoset id, or -1 where the
 * infoset is irrelevant (another player's, or unreachable under the plan).
 */
using Plan = std::vector<std::int32_t>;

template <typename Scalar>
BasicProfile<Scalar> uniform_profile(const InfoSetPartition& part) {
  BasicProfile<Scalar> prof;
  prof.probs.reserve(part.size());
  for (const auto& is : part.infosets) {
    const auto k = is.num_actions();
    prof.probs.emplace_back(k, Scalar(1) / Scalar(static_cast<int>(k)));
  }
  return prof;
}

/** Writes the pure actions of `plan` into `prof` for every infoset the plan covers. */
template <typename Scalar>
void apply_plan(BasicProfile<Scalar>& prof, const InfoSetPartition& part, const Plan& plan) {
  if (prof.probs.size() != part.size()) prof.probs.resize(part.size());
  for (std::size_t i = 0; i < plan.size() && i < part.size(); ++i) {
    if (plan[i] < 0) continue;
    auto& v = prof.probs[i];
    v.assign(part.infosets[i].num_actions(), Scalar(0));
    v[static_cast<std::size_t>(plan[i])] = Scalar(1);
  }
}

/** Profile from several pure plans (for disjoint player sets). */
template <typename Scalar>
BasicProfile<Scalar> profile_from_plans(const InfoSetPartition& part, std::initializer_list<const Plan*> plans) {
  BasicProfile<Scalar> prof;
  prof.probs.resize(part.size());
  for (const Plan* p : plans) apply_plan(prof, part, *p);
  return prof;
}

namespace detail {

template <typename Scalar>
bool near_one(const Scalar& s) {
  if constexpr (std::is_same_v<Scalar, Rational>) return s == 1;
  else return std::fabs(static_cast<double>(s) - 1.0) <= 1e-9;
}

template <typename Scalar>
Scalar chance_p(const GameTree& g, std::uint64_t e) {
  if constexpr (std::is_same_v<Scalar, Rational>) return g.chance_prob_exact(e);
  else return static_cast<Scalar>(g.chance_prob(e));
}

template <typename Scalar>
const Scalar payoff_entry(const GameTree& g, NodeId z, std::size_t p) {
  if constexpr (std::is_same_v<Scalar, Rational>) return g.payoff(z)[p];
  else return static_cast<Scalar>(g.payoff_d(z)[p]);
}

}  // namespace detail

/** Checks that `prof` assigns a distribution to every infoset reached in `part`. */
template <typename Scalar>
void validate_profile(const InfoSetPartition& part, const BasicProfile<Scalar>& prof) {
  if (prof.probs.size() != part.size())
    throw ValidationError("profile covers " + std::to_string(prof.probs.size()) + " infosets, partition has " +
                          std::to_string(part.size()));
  for (std::size_t i = 0; i < part.size(); ++i) {
    const auto& v = prof.probs[i];
    if (v.empty()) continue;  // unreachable under a reduced plan; checked lazily during evaluation
    if (v.size() != part.infosets[i].num_actions())
      throw ValidationError("profile for infoset " + std::to_string(i) + " has wrong length");
    Scalar s = 0;
    for (const auto& x : v) {
      if (x < 0) throw ValidationError("negative probability at infoset " + std::to_string(i));
      s += x;
    }
    if (!detail::near_one(s)) throw ValidationError("distribution at infoset " + std::to_string(i) + " does not sum to 1");
  }
}

/**
 * Expected payoff vector (one entry per player, chance entry 0) of `prof` by
 * a single pre-order pass accumulating reach probabilities.
 */
template <typename Scalar>
std::vector<Scalar> expected_payoff(const GameTree& g, const InfoSetPartition& part, const BasicProfile<Scalar>& prof) {
  validate_profile(part, prof);
  std::vector<Scalar> reach(g.num_nodes(), Scalar(0));
  std::vector<Scalar> out(g.num_players(), Scalar(0));
  reach[0] = 1;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (reach[h] == 0) continue;
    const auto k = g.num_actions[h];
    switch (g.kind[h]) {
      case NodeKind::Terminal:
        for (std::size_t p = 1; p < g.num_players(); ++p) out[p] += reach[h] * detail::payoff_entry<Scalar>(g, h, p);
        break;
      case NodeKind::Chance:
        for (std::size_t a = 0; a < k; ++a) reach[g.child_of(h, a)] = reach[h] * detail::chance_p<Scalar>(g, g.edge(h, a));
        break;
      case NodeKind::Decision: {
        const auto& v = prof.probs[part.of(h)];
        if (v.empty())
          throw ValidationError("profile has no distribution for reached infoset " + std::to_string(part.of(h)));
        for (std::size_t a = 0; a < k; ++a) reach[g.child_of(h, a)] = reach[h] * v[a];
        break;
      }
    }
  }
  return out;
}

/** Expected payoff of a pure plan pair (or tuple) in exact arithmetic. */
inline std::vector<Rational> plan_payoff(const GameTree& g, const InfoSetPartition& part,
                                         std::initializer_list<const Plan*> plans) {
  return expected_payoff(g, part, profile_from_plans<Rational>(part, plans));
}

}  // namespace teamgame

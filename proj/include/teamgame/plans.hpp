#pragma once

// Reduced pure-plan enumeration for a set of players under an arbitrary
// infoset partition (imperfect recall allowed), plus exact reduced-plan
// counting for perfect-recall players.

#include "teamgame/payoff.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace teamgame {

inline constexpr std::uint64_t kDefaultPlanBudget = 1'000'000;

namespace detail {

/** Smallest-id infoset of `who` reached under `plan` but not yet assigned, or -1. */
inline std::int64_t open_infoset(const GameTree& g, const InfoSetPartition& part, const std::vector<char>& who,
                                 const Plan& plan, std::vector<NodeId>& stack) {
  std::int64_t best = -1;
  stack.assign(1, 0);
  while (!stack.empty()) {
    const NodeId h = stack.back();
    stack.pop_back();
    const auto k = g.num_actions[h];
    if (g.kind[h] == NodeKind::Decision && who[g.actor[h]]) {
      const auto id = part.of(h);
      if (plan[id] < 0) {
        if (best < 0 || id < best) best = id;
        continue;
      }
      stack.push_back(g.child_of(h, static_cast<std::size_t>(plan[id])));
      continue;
    }
    for (std::size_t a = 0; a < k; ++a) stack.push_back(g.child_of(h, a));
  }
  return best;
}

}  // namespace detail

/**
 * All reduced pure plans of the players flagged in `who` (indexed by player
 * id): each plan assigns exactly the infosets reachable under itself.
 * Throws ResourceError past `budget` plans.
 */
inline std::vector<Plan> enumerate_plans(const GameTree& g, const InfoSetPartition& part, const std::vector<char>& who,
                                         std::uint64_t budget = kDefaultPlanBudget) {
  std::vector<Plan> out;
  Plan plan(part.size(), -1);
  std::vector<NodeId> stack;
  auto rec = [&](auto&& self) -> void {
    const auto id = detail::open_infoset(g, part, who, plan, stack);
    if (id < 0) {
      if (out.size() >= budget) throw ResourceError("plan enumeration exceeds budget", BigInt(budget) + 1);
      out.push_back(plan);
      return;
    }
    const auto k = part.infosets[static_cast<std::size_t>(id)].num_actions();
    for (std::size_t a = 0; a < k; ++a) {
      plan[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(a);
      self(self);
    }
    plan[static_cast<std::size_t>(id)] = -1;
  };
  rec(rec);
  return out;
}

inline std::vector<char> player_mask(const GameTree& g, std::initializer_list<PlayerId> players) {
  std::vector<char> m(g.num_players(), 0);
  for (auto p : players) m.at(p) = 1;
  return m;
}

inline std::vector<char> role_mask(const GameTree& g, Role r) {
  std::vector<char> m(g.num_players(), 0);
  for (auto p : g.players_with_role(r)) m[p] = 1;
  return m;
}

/**
 * Number of reduced pure plans of a perfect-recall player, by recursion over
 * its own sequences: plans(I) = sum over actions of the product of plans of
 * the infosets that follow that action.
 */
inline BigInt count_reduced_plans(const GameTree& g, const InfoSetPartition& part, PlayerId player) {
  const auto d = validate_perfect_recall(g, part, player);
  if (!d.ok()) throw ValidationError("plan counting needs perfect recall: " + d.summary(1));
  // parent sequence of each infoset: (infoset, action) or root (-1)
  std::vector<std::int64_t> last(g.num_nodes(), -1);  // encoded infoset * 65536 + action
  std::map<std::int64_t, std::vector<std::uint32_t>> children;
  std::vector<char> seen(part.size(), 0);
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    const bool own = g.kind[h] == NodeKind::Decision && g.actor[h] == player;
    if (own && !seen[part.of(h)]) {
      seen[part.of(h)] = 1;
      children[last[h]].push_back(part.of(h));
    }
    for (std::size_t a = 0; a < g.num_actions[h]; ++a)
      last[g.child_of(h, a)] = own ? static_cast<std::int64_t>(part.of(h)) * 65536 + static_cast<std::int64_t>(a) : last[h];
  }
  std::map<std::uint32_t, BigInt> memo;
  auto plans_of = [&](auto&& self, std::uint32_t id) -> BigInt {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    BigInt total = 0;
    for (std::size_t a = 0; a < part.infosets[id].num_actions(); ++a) {
      BigInt prod = 1;
      if (auto it = children.find(static_cast<std::int64_t>(id) * 65536 + static_cast<std::int64_t>(a)); it != children.end())
        for (auto c : it->second) prod *= self(self, c);
      total += prod;
    }
    return memo[id] = total;
  };
  BigInt result = 1;
  if (auto it = children.find(-1); it != children.end())
    for (auto c : it->second) result *= plans_of(plans_of, c);
  return result;
}

/** Joint reduced plans of several perfect-recall players: the product of per-player counts. */
inline BigInt count_joint_plans(const GameTree& g, const InfoSetPartition& part, const std::vector<PlayerId>& players) {
  BigInt r = 1;
  for (auto p : players) r *= count_reduced_plans(g, part, p);
  return r;
}

/** Sum of the payoffs of `players` under a pure plan tuple (exact). */
inline Rational plans_value(const GameTree& g, const InfoSetPartition& part, const Plan& a, const Plan& b,
                            const std::vector<char>& players) {
  const auto v = plan_payoff(g, part, {&a, &b});
  Rational s = 0;
  for (std::size_t p = 1; p < v.size(); ++p)
    if (players[p]) s += v[p];
  return s;
}

}  // namespace teamgame

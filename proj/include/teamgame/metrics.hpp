#pragma once

// Strategy correspondence between an original team game and its MPTA
// transform: plan mapping tables, embedding of joint team plans as
// coordinator plans, mapping of coordinator plans back (a single plan under
// rule-A, a uniform mixture over dummy-indexed contingencies under rule-B),
// mixture mapping, and a seeded payoff-equivalence checker.

#include "teamgame/payoff.hpp"
#include "teamgame/plans.hpp"
#include "teamgame/transform.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace teamgame {

struct CoordinatorTarget {
  PlayerId member = 0;              // original acting team member
  std::uint32_t infoset = 0;        // original team infoset
  std::uint32_t choice = kNoChoice; // dummy outcome (rule-B); kNoChoice under rule-A
  NodeId node = kNoNode;            // original node (rule-A key); kNoNode under rule-B
};

struct PlanMapping {
  InfosetRule rule = InfosetRule::B;
  bool coordinator_dummies = false;  // dummies owned by the coordinator
  std::size_t original_infosets = 0, transformed_infosets = 0;
  // transformed coordinator infoset -> target (only coordinator decision infosets; dummies excluded)
  std::map<std::uint32_t, CoordinatorTarget> coordinator;
  // transformed coordinator-owned dummy infoset -> original team infoset it guards
  std::map<std::uint32_t, std::uint32_t> dummy_infoset;
  // original team infoset -> transformed coordinator infosets (rule-B: indexed by dummy choice)
  std::map<std::uint32_t, std::vector<std::uint32_t>> images;
  // original team infoset -> transformed dummy infoset (coordinator-owned dummies only)
  std::map<std::uint32_t, std::uint32_t> guard;
  // opponent infosets, both directions
  std::map<std::uint32_t, std::uint32_t> opponent_to_transformed, opponent_to_original;
};

/** Builds the correspondence from the transform's node lineage; verifies totality and consistency. */
inline PlanMapping build_plan_mapping(const GameTree& original, const InfoSetPartition& orig_part,
                                      const TransformResult& t) {
  if (t.report.method != "mpta") throw ValidationError("plan mapping is defined for MPTA outputs only");
  PlanMapping m;
  m.rule = parse_rule(t.report.rule);
  m.coordinator_dummies = parse_ownership(t.report.ownership) == DummyOwnership::CoordinatorOwned;
  m.original_infosets = orig_part.size();
  m.transformed_infosets = t.partition.size();
  const auto& g = t.game;
  const auto& lin = t.lineage;
  auto fail = [](const std::string& s) { throw ValidationError("inconsistent plan mapping: " + s); };
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] != NodeKind::Decision) continue;
    const auto J = t.partition.of(h);
    const NodeId o = lin.origin[h];
    if (o >= original.num_nodes()) fail("node " + std::to_string(h) + " has no origin");
    const auto I = orig_part.of(o);
    if (g.actor[h] == kOpponent2p) {
      auto [it, ins] = m.opponent_to_transformed.try_emplace(I, J);
      if (!ins && it->second != J) fail("original opponent infoset " + std::to_string(I) + " splits");
      auto [it2, ins2] = m.opponent_to_original.try_emplace(J, I);
      if (!ins2 && it2->second != I) fail("transformed opponent infoset " + std::to_string(J) + " merges");
      continue;
    }
    if (lin.is_dummy[h]) {
      auto [it, ins] = m.dummy_infoset.try_emplace(J, I);
      if (!ins && it->second != I) fail("dummy infoset guards several original infosets");
      m.guard[I] = J;
      continue;
    }
    CoordinatorTarget tg;
    tg.member = lin.member[h];
    tg.infoset = I;
    if (m.rule == InfosetRule::A) tg.node = o;
    else tg.choice = lin.dummy_choice[h];
    auto [it, ins] = m.coordinator.try_emplace(J, tg);
    if (!ins && (it->second.infoset != I || it->second.choice != tg.choice || it->second.node != tg.node))
      fail("coordinator infoset " + std::to_string(J) + " maps to several targets");
    auto& img = m.images[I];
    if (m.rule == InfosetRule::B) {
      if (img.size() <= tg.choice) img.resize(tg.choice + 1, std::numeric_limits<std::uint32_t>::max());
      if (img[tg.choice] != std::numeric_limits<std::uint32_t>::max() && img[tg.choice] != J)
        fail("(infoset, choice) pair maps to several coordinator infosets");
      img[tg.choice] = J;
    } else if (std::find(img.begin(), img.end(), J) == img.end()) {
      img.push_back(J);
    }
  }
  for (const auto& [I, img] : m.images)
    for (auto J : img)
      if (J == std::numeric_limits<std::uint32_t>::max()) fail("original infoset " + std::to_string(I) + " misses a choice");
  return m;
}

/** Coordinator plan realising joint team plan `team` in every dummy contingency (and opponent unchanged). */
inline Plan embed_team_plan(const PlanMapping& m, const Plan& team) {
  Plan out(m.transformed_infosets, -1);
  for (const auto& [I, img] : m.images) {
    if (I >= team.size() || team[I] < 0) continue;
    for (auto J : img) out[J] = team[I];
  }
  if (m.coordinator_dummies)
    for (const auto& [I, J] : m.guard)
      if (I < team.size() && team[I] >= 0) out[J] = 0;
  return out;
}

/** Transformed opponent plan equal to the original opponent plan `opp`. */
inline Plan map_opponent_plan(const PlanMapping& m, const Plan& opp) {
  Plan out(m.transformed_infosets, -1);
  for (const auto& [I, J] : m.opponent_to_transformed)
    if (I < opp.size()) out[J] = opp[I];
  return out;
}

/** Original opponent plan from a transformed opponent plan. */
inline Plan unmap_opponent_plan(const PlanMapping& m, const Plan& opp) {
  Plan out(m.original_infosets, -1);
  for (const auto& [J, I] : m.opponent_to_original)
    if (J < opp.size()) out[I] = opp[J];
  return out;
}

/**
 * Team behaviour induced in the original game by a coordinator plan: under
 * rule-B each original infoset plays the coordinator's action for a uniform
 * dummy outcome (a uniform mixture over contingencies); with
 * coordinator-owned dummies the guarded outcome is the plan's dummy choice;
 * under rule-A the action of the lowest-id replica infoset is used.
 */
inline ExactProfile team_behavior_of(const PlanMapping& m, const InfoSetPartition& orig_part, const Plan& coord) {
  ExactProfile prof;
  prof.probs.resize(m.original_infosets);
  for (const auto& [I, img] : m.images) {
    std::vector<std::int32_t> acts;
    if (m.rule == InfosetRule::A) {
      const auto J = *std::min_element(img.begin(), img.end());
      if (coord[J] >= 0) acts.push_back(coord[J]);
    } else if (m.coordinator_dummies && m.guard.count(I)) {
      const auto d = coord[m.guard.at(I)];
      if (d >= 0 && coord[img[static_cast<std::size_t>(d)]] >= 0) acts.push_back(coord[img[static_cast<std::size_t>(d)]]);
    } else {
      for (auto J : img)
        if (coord[J] >= 0) acts.push_back(coord[J]);
    }
    if (acts.empty()) continue;  // unreachable under the plan
    auto& v = prof.probs[I];
    v.assign(orig_part.infosets[I].num_actions(), Rational(0));
    for (auto a : acts) v[static_cast<std::size_t>(a)] += Rational(1, static_cast<int>(acts.size()));
  }
  return prof;
}

struct WeightedPlan {
  Plan plan;
  Rational weight;
};

/**
 * Explicit mixture of joint team plans represented by a coordinator plan:
 * one component per combination of distinct contingency actions (rule-B),
 * merged by plan and weighted by product probabilities; a single component
 * under rule-A.  Throws ResourceError past `max_components`.
 */
inline std::vector<WeightedPlan> map_coordinator_plan(const PlanMapping& m, const InfoSetPartition& orig_part,
                                                      const Plan& coord, std::size_t max_components = 4096) {
  const auto beh = team_behavior_of(m, orig_part, coord);
  std::vector<WeightedPlan> out{{Plan(m.original_infosets, -1), Rational(1)}};
  for (const auto& [I, img] : m.images) {
    (void)img;
    const auto& v = beh.probs[I];
    if (v.empty()) continue;
    std::vector<WeightedPlan> next;
    for (const auto& wp : out)
      for (std::size_t a = 0; a < v.size(); ++a) {
        if (v[a] == 0) continue;
        WeightedPlan c = wp;
        c.plan[I] = static_cast<std::int32_t>(a);
        c.weight *= v[a];
        next.push_back(std::move(c));
      }
    if (next.size() > max_components) throw ResourceError("mixture expansion exceeds component cap", BigInt(next.size()));
    out = std::move(next);
  }
  return out;
}

/** Image of a finite team mixture as a coordinator mixture (identical images have their weights summed). */
inline std::vector<WeightedPlan> map_team_mixture(const PlanMapping& m, const std::vector<WeightedPlan>& mixture) {
  Rational total = 0;
  for (const auto& wp : mixture) {
    if (wp.weight < 0) throw ValidationError("negative mixture weight");
    total += wp.weight;
  }
  if (std::fabs(to_double(total - 1)) > 1e-12) throw ValidationError("mixture weights do not sum to 1");
  std::map<Plan, Rational> acc;
  for (const auto& wp : mixture) acc[embed_team_plan(m, wp.plan)] += wp.weight;
  std::vector<WeightedPlan> out;
  for (auto& [p, w] : acc) out.push_back({p, w});
  return out;
}

struct EquivalenceViolation {
  std::size_t trial = 0;
  std::string direction;  // "embed" or "map"
  Plan team_or_coordinator_plan, opponent_plan;
  Rational original_value, transformed_value;
};

struct EquivalenceReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::string semantics;
  Rational scale_factor = 1;
  std::vector<EquivalenceViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline Plan random_plan(const InfoSetPartition& part, const std::vector<char>& who, std::mt19937_64& rng,
                        std::size_t size) {
  Plan p(size, -1);
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (!who[part.infosets[i].player]) continue;
    std::uniform_int_distribution<std::int32_t> d(0, static_cast<std::int32_t>(part.infosets[i].num_actions()) - 1);
    p[i] = d(rng);
  }
  return p;
}

inline Rational role_sum(const std::vector<Rational>& v, const std::vector<char>& mask) {
  Rational s = 0;
  for (std::size_t p = 1; p < v.size(); ++p)
    if (mask[p]) s += v[p];
  return s;
}

}  // namespace detail

/**
 * Seeded equivalence check: for `trials` random pure plan pairs, the team
 * payoff in the original game equals the coordinator payoff in the
 * transform divided by the scale factor, exactly.  Two directions per
 * trial: "embed" (random joint team plan, embedded) and "map" (random
 * coordinator plan, mapped back to team behaviour: a uniform mixture over
 * dummy contingencies under rule-B; plans constant per original infoset
 * under rule-A, where the mapping is plan-to-plan).
 */
inline EquivalenceReport check_payoff_equivalence(const GameTree& original, const InfoSetPartition& orig_part,
                                                  const TransformResult& t, const PlanMapping& m, std::size_t trials,
                                                  std::uint64_t seed) {
  EquivalenceReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.scale_factor = t.report.scale_factor;
  rep.semantics = m.rule == InfosetRule::B
                      ? "rule-B: coordinator value equals the original value of the uniform mixture over dummy contingencies"
                      : "rule-A: plan-to-plan (coordinator plans constant across replicas of an original infoset)";
  std::mt19937_64 rng(seed);
  const auto team_mask = role_mask(original, Role::Team);
  const auto opp_mask = role_mask(original, Role::Opponent);
  std::vector<char> coord_mask(t.game.num_players(), 0), topp_mask(t.game.num_players(), 0);
  coord_mask[kCoordinator2p] = 1;
  topp_mask[kOpponent2p] = 1;
  if (original.players_with_role(Role::Team).empty() || m.images.empty()) return rep;  // vacuous
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Plan opp = detail::random_plan(orig_part, opp_mask, rng, orig_part.size());
    const Plan topp = map_opponent_plan(m, opp);
    // embed direction
    {
      const Plan team = detail::random_plan(orig_part, team_mask, rng, orig_part.size());
      const Plan coord = embed_team_plan(m, team);
      const auto u = detail::role_sum(plan_payoff(original, orig_part, {&team, &opp}), team_mask);
      const auto ut = plan_payoff(t.game, t.partition, {&coord, &topp})[kCoordinator2p];
      ++rep.checks;
      if (ut / rep.scale_factor != u) rep.violations.push_back(EquivalenceViolation{trial, "embed", team, opp, u, ut});
    }
    // map direction
    {
      Plan coord = detail::random_plan(t.partition, coord_mask, rng, t.partition.size());
      if (m.rule == InfosetRule::A)
        for (const auto& [I, img] : m.images)
          for (auto J : img) coord[J] = coord[*std::min_element(img.begin(), img.end())];
      const auto beh = team_behavior_of(m, orig_part, coord);
      auto prof = profile_from_plans<Rational>(orig_part, {&opp});
      for (std::size_t i = 0; i < orig_part.size(); ++i)
        if (!beh.probs[i].empty()) prof.probs[i] = beh.probs[i];
      const auto u = detail::role_sum(expected_payoff(original, orig_part, prof), team_mask);
      const auto ut = plan_payoff(t.game, t.partition, {&coord, &topp})[kCoordinator2p];
      ++rep.checks;
      if (ut / rep.scale_factor != u) rep.violations.push_back(EquivalenceViolation{trial, "map", coord, opp, u, ut});
    }
  }
  return rep;
}

}  // namespace teamgame

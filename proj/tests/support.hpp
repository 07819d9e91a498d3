#pragma once

// Test helpers: a tiny declarative tree builder and reference evaluators
// that are deliberately independent of the library's own algorithms.

#include "teamgame/game_tree.hpp"
#include "teamgame/payoff.hpp"

#include <random>
#include <string>
#include <vector>

namespace testutil {

using namespace teamgame;

struct Edge;

/** A node spec; edges carry a label, a per-strategic-player visibility string ('y'/'n') and a chance probability. */
struct Node {
  NodeKind kind = NodeKind::Terminal;
  PlayerId actor = kChance;
  std::vector<Edge> edges;
  std::vector<Rational> payoff;
};

struct Edge {
  std::string label;
  std::string visible;
  Rational prob = 0;
  Node child;
};

inline Node leaf(std::vector<Rational> payoff) {
  Node n;
  n.payoff = std::move(payoff);
  return n;
}

inline Node decide(PlayerId who, std::vector<Edge> edges) {
  Node n;
  n.kind = NodeKind::Decision;
  n.actor = who;
  n.edges = std::move(edges);
  return n;
}

inline Node chance(std::vector<Edge> edges) {
  Node n;
  n.kind = NodeKind::Chance;
  n.edges = std::move(edges);
  return n;
}

namespace detail {

inline void emit(TreeBuilder& b, GameTree& g, const Node& n, std::uint64_t in) {
  if (n.kind == NodeKind::Terminal) {
    b.add_terminal(n.payoff, in);
    return;
  }
  const NodeId h = b.add_node(n.kind, n.actor, n.edges.size(), in);
  for (std::size_t a = 0; a < n.edges.size(); ++a) {
    const auto& e = n.edges[a];
    const auto lab = b.symbol(e.label);
    std::vector<std::uint32_t> tokens(g.num_players(), kHidden);
    for (std::size_t p = 1; p < g.num_players(); ++p)
      if (p - 1 < e.visible.size() && e.visible[p - 1] == 'y') tokens[p] = lab;
    b.set_edge(b.edge(h, a), lab, b.observation(tokens), n.kind == NodeKind::Chance ? &e.prob : nullptr);
  }
  for (std::size_t a = 0; a < n.edges.size(); ++a) emit(b, g, n.edges[a].child, b.edge(h, a));
}

}  // namespace detail

/** Builds and validates a game from a spec; `players` excludes chance. */
inline GameTree build(const std::vector<Player>& players, const Node& root) {
  GameTree g;
  g.players.push_back({"chance", Role::Chance});
  for (const auto& p : players) g.players.push_back(p);
  TreeBuilder b(g);
  detail::emit(b, g, root, TreeBuilder::kNoEdge);
  g.validate();
  return g;
}

/** Two-player matching pennies: player 1 moves hidden, player 2 matches or not; player 1 wins on a match. */
inline GameTree matching_pennies() {
  auto p2 = [](int first) {
    return decide(2, {{"h", "yy", 0, leaf({0, first == 0 ? 1 : -1, first == 0 ? -1 : 1})},
                      {"t", "yy", 0, leaf({0, first == 1 ? 1 : -1, first == 1 ? -1 : 1})}});
  };
  return build({{"P1", Role::Coordinator}, {"P2", Role::Opponent}},
               decide(1, {{"h", "yn", 0, p2(0)}, {"t", "yn", 0, p2(1)}}));
}

/** Reference evaluator: expected payoffs of a pure plan tuple by explicit path following over chance. */
inline std::vector<Rational> follow_plans(const GameTree& g, const InfoSetPartition& part, const std::vector<const Plan*>& plans,
                                          NodeId h = 0) {
  if (g.kind[h] == NodeKind::Terminal) return g.payoff(h);
  if (g.kind[h] == NodeKind::Chance) {
    std::vector<Rational> acc(g.num_players(), Rational(0));
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) {
      const auto v = follow_plans(g, part, plans, g.child_of(h, a));
      for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += g.chance_prob_exact(g.edge(h, a)) * v[p];
    }
    return acc;
  }
  const auto id = part.of(h);
  for (const auto* plan : plans)
    if ((*plan)[id] >= 0) return follow_plans(g, part, plans, g.child_of(h, static_cast<std::size_t>((*plan)[id])));
  throw std::logic_error("no plan assigns a reached infoset");
}

/** A uniformly random complete pure plan (every infoset assigned) for the players flagged in `who`. */
inline Plan random_full_plan(const GameTree& g, const InfoSetPartition& part, const std::vector<char>& who, std::mt19937_64& rng) {
  (void)g;
  Plan plan(part.size(), -1);
  for (std::size_t i = 0; i < part.size(); ++i)
    if (who[part.infosets[i].player])
      plan[i] = static_cast<std::int32_t>(std::uniform_int_distribution<std::size_t>(0, part.infosets[i].num_actions() - 1)(rng));
  return plan;
}

inline BehavioralProfile uniform_profile(const InfoSetPartition& part) {
  BehavioralProfile prof;
  for (const auto& I : part.infosets) prof.probs.emplace_back(I.num_actions(), 1.0 / static_cast<double>(I.num_actions()));
  return prof;
}

inline BehavioralProfile random_profile(const InfoSetPartition& part, std::mt19937_64& rng) {
  BehavioralProfile prof;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (const auto& I : part.infosets) {
    std::vector<double> v(I.num_actions());
    double s = 0;
    for (auto& x : v) s += x = u(rng);
    for (auto& x : v) x /= s;
    prof.probs.push_back(v);
  }
  return prof;
}

}  // namespace testutil

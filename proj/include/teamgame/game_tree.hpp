#pragma once

// Extensive-form game trees with per-(action, observer) visibility.
//
// Nodes live in a flat arena indexed by dense identifiers assigned in
// depth-first pre-order.  Every action (edge) carries an observation vector:
// for each player either "hidden" (the observer only learns that some action
// happened) or a token describing what that observer sees.  An action is
// observable by a player when the player's token is non-hidden; the usual
// case is that the token equals the action label.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace teamgame {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using NodeId = std::uint32_t;
using PlayerId = std::uint8_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr std::uint32_t kHidden = 0;  // observation token meaning "not observable"
inline constexpr PlayerId kChance = 0;
inline constexpr std::uint8_t kNoState = 0xff;

/** Raised when a game, profile, or file violates a structural requirement. */
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Raised when an operation would exceed a configured size budget. */
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, BigInt projected)
      : std::runtime_error(what), projected_(std::move(projected)) {}
  const BigInt& projected() const { return projected_; }

 private:
  BigInt projected_;
};

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline Rational parse_rational(std::string_view s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(BigInt(std::string(s)));
    return Rational(BigInt(std::string(s.substr(0, slash))),
                    BigInt(std::string(s.substr(slash + 1))));
  } catch (const std::exception&) {
    throw ValidationError("malformed rational '" + std::string(s) + "'");
  }
}

/** Hash-consing table mapping values to dense ids (first insertion order). */
template <typename T, typename Hash = std::hash<T>>
class Interner {
 public:
  std::uint32_t intern(const T& v) {
    auto it = index_.find(v);
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(values_.size());
    values_.push_back(v);
    index_.emplace(v, id);
    return id;
  }
  const T& operator[](std::uint32_t id) const { return values_[id]; }
  std::size_t size() const { return values_.size(); }
  const std::vector<T>& values() const { return values_; }

 private:
  std::vector<T> values_;
  std::unordered_map<T, std::uint32_t, Hash> index_;
};

struct VectorHash {
  template <typename T>
  std::size_t operator()(const std::vector<T>& v) const {
    std::size_t h = v.size();
    for (const auto& x : v) h = h * 1000003u ^ std::hash<T>{}(x);
    return h;
  }
};

struct RationalVectorHash {
  std::size_t operator()(const std::vector<Rational>& v) const {
    std::size_t h = v.size();
    for (const auto& x : v) h = h * 1000003u ^ std::hash<std::string>{}(to_string(x));
    return h;
  }
};

enum class NodeKind : std::uint8_t { Chance, Decision, Terminal };
enum class Role : std::uint8_t { Chance, Opponent, Team, Coordinator };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::Chance: return "chance";
    case Role::Opponent: return "opponent";
    case Role::Team: return "team";
    case Role::Coordinator: return "coordinator";
  }
  return "?";
}

inline Role parse_role(std::string_view s) {
  if (s == "chance") return Role::Chance;
  if (s == "opponent") return Role::Opponent;
  if (s == "team") return Role::Team;
  if (s == "coordinator") return Role::Coordinator;
  throw ValidationError("unknown player role '" + std::string(s) + "'");
}

struct Player {
  std::string name;
  Role role = Role::Chance;
};

/**
 * Immutable-after-construction game tree.  Player 0 is always chance.
 * Node arrays are indexed by NodeId, edge arrays by edge index; the edges of
 * node h are [edge_begin[h], edge_begin[h] + num_actions[h]).
 */
class GameTree {
 public:
  std::vector<Player> players;
  std::vector<std::string> omega;  // distinguishable private states

  // node arrays
  std::vector<NodeKind> kind;
  std::vector<PlayerId> actor;
  std::vector<NodeId> parent;
  std::vector<std::uint16_t> depth;
  std::vector<std::uint64_t> edge_begin;
  std::vector<std::uint16_t> num_actions;
  std::vector<std::uint32_t> payoff_index;  // terminals only

  // edge arrays
  std::vector<NodeId> child;
  std::vector<std::uint32_t> label;        // symbol id
  std::vector<std::uint32_t> observation;  // index into observations
  std::vector<std::uint32_t> prob_index;   // chance edges: index into probs

  // shared tables
  Interner<std::string> symbols;  // symbol 0 is the empty "hidden" token
  Interner<std::vector<std::uint32_t>, VectorHash> observations;
  std::vector<Rational> probs;
  std::vector<double> probs_d;
  Interner<std::vector<Rational>, RationalVectorHash> payoffs;  // one entry per player (index 0 = chance, unused)
  std::vector<std::vector<double>> payoffs_d;

  // Optional per-(node, player) private information recorded by generators:
  // the player's current private state (kNoState if none) and the pool of
  // states that player could hold given public information (bitmask over omega).
  std::vector<std::uint8_t> private_state;
  std::vector<std::uint16_t> private_pool;

  GameTree() { symbols.intern(""); }

  std::size_t num_nodes() const { return kind.size(); }
  std::size_t num_players() const { return players.size(); }
  NodeId root() const { return 0; }
  bool has_private_info() const { return !private_state.empty(); }

  std::uint64_t edge(NodeId h, std::size_t a) const { return edge_begin[h] + a; }
  NodeId child_of(NodeId h, std::size_t a) const { return child[edge(h, a)]; }
  const std::string& label_of(NodeId h, std::size_t a) const { return symbols[label[edge(h, a)]]; }
  std::uint32_t token(std::uint64_t e, PlayerId p) const { return observations[observation[e]][p]; }
  bool observable(std::uint64_t e, PlayerId p) const { return token(e, p) != kHidden; }
  double chance_prob(std::uint64_t e) const { return probs_d[prob_index[e]]; }
  const Rational& chance_prob_exact(std::uint64_t e) const { return probs[prob_index[e]]; }
  const std::vector<Rational>& payoff(NodeId z) const { return payoffs[payoff_index[z]]; }
  const std::vector<double>& payoff_d(NodeId z) const { return payoffs_d[payoff_index[z]]; }

  std::uint8_t state_of(NodeId h, PlayerId p) const {
    return has_private_info() ? private_state[h * num_players() + p] : kNoState;
  }
  std::uint16_t pool_of(NodeId h, PlayerId p) const {
    return has_private_info() ? private_pool[h * num_players() + p] : 0;
  }

  std::vector<PlayerId> players_with_role(Role r) const {
    std::vector<PlayerId> out;
    for (std::size_t p = 0; p < players.size(); ++p)
      if (players[p].role == r) out.push_back(static_cast<PlayerId>(p));
    return out;
  }
  bool is_team(PlayerId p) const { return players[p].role == Role::Team; }

  /** Checks the structural invariants; throws ValidationError naming the node. */
  void validate() const {
    const std::size_t n = num_nodes();
    if (n == 0) throw ValidationError("game has no nodes");
    if (parent[0] != kNoNode) throw ValidationError("node 0 must be the root");
    for (NodeId h = 0; h < n; ++h) {
      const auto k = num_actions[h];
      if (kind[h] == NodeKind::Terminal) {
        if (k != 0) throw ValidationError("terminal node " + std::to_string(h) + " has actions");
        if (payoff(h).size() != num_players())
          throw ValidationError("terminal node " + std::to_string(h) + " payoff vector has wrong length");
        continue;
      }
      if (k == 0) throw ValidationError("non-terminal node " + std::to_string(h) + " has no actions");
      if (kind[h] == NodeKind::Chance && actor[h] != kChance)
        throw ValidationError("chance node " + std::to_string(h) + " not owned by chance");
      if (kind[h] == NodeKind::Decision && (actor[h] == kChance || actor[h] >= num_players()))
        throw ValidationError("decision node " + std::to_string(h) + " has invalid actor");
      Rational total = 0;
      for (std::size_t a = 0; a < k; ++a) {
        const auto e = edge(h, a);
        const NodeId c = child[e];
        if (c == kNoNode || c >= n || parent[c] != h)
          throw ValidationError("node " + std::to_string(h) + " action " + symbols[label[e]] +
                                " has a broken child link");
        if (c <= h) throw ValidationError("node ids are not in pre-order at node " + std::to_string(h));
        if (observations[observation[e]].size() != num_players())
          throw ValidationError("node " + std::to_string(h) + " action " + symbols[label[e]] +
                                " has a malformed visibility map");
        if (kind[h] == NodeKind::Chance) total += probs[prob_index[e]];
      }
      if (kind[h] == NodeKind::Chance && total != 1)
        throw ValidationError("chance node " + std::to_string(h) + " probabilities sum to " + to_string(total));
    }
  }
};

/** Appends nodes in depth-first pre-order. */
class TreeBuilder {
 public:
  explicit TreeBuilder(GameTree& g, bool record_private = false) : g_(g), record_private_(record_private) {
    g_.probs.clear();
    g_.probs_d.clear();
  }

  /** Creates a node; `incoming_edge` is the parent's edge index (kNoEdge for the root). */
  NodeId add_node(NodeKind k, PlayerId actor, std::size_t num_actions, std::uint64_t incoming_edge) {
    const auto id = static_cast<NodeId>(g_.kind.size());
    if (id == kNoNode) throw ResourceError("node arena exhausted", BigInt(id));
    g_.kind.push_back(k);
    g_.actor.push_back(actor);
    NodeId par = kNoNode;
    std::uint16_t d = 0;
    if (incoming_edge != kNoEdge) {
      g_.child[incoming_edge] = id;
      par = parent_of_edge_[incoming_edge];
      d = static_cast<std::uint16_t>(g_.depth[par] + 1);
    }
    g_.parent.push_back(par);
    g_.depth.push_back(d);
    g_.edge_begin.push_back(g_.child.size());
    g_.num_actions.push_back(static_cast<std::uint16_t>(num_actions));
    g_.payoff_index.push_back(0);
    for (std::size_t a = 0; a < num_actions; ++a) {
      g_.child.push_back(kNoNode);
      g_.label.push_back(0);
      g_.observation.push_back(0);
      g_.prob_index.push_back(0);
      parent_of_edge_.push_back(id);
    }
    if (record_private_) {
      g_.private_state.resize(g_.kind.size() * g_.num_players(), kNoState);
      g_.private_pool.resize(g_.kind.size() * g_.num_players(), 0);
    }
    return id;
  }

  NodeId add_terminal(const std::vector<Rational>& payoff, std::uint64_t incoming_edge) {
    const NodeId z = add_node(NodeKind::Terminal, kChance, 0, incoming_edge);
    g_.payoff_index[z] = intern_payoff(payoff);
    return z;
  }

  std::uint32_t intern_payoff(const std::vector<Rational>& payoff) {
    const auto before = g_.payoffs.size();
    const auto idx = g_.payoffs.intern(payoff);
    if (g_.payoffs.size() != before) {
      std::vector<double> d;
      d.reserve(payoff.size());
      for (const auto& x : payoff) d.push_back(to_double(x));
      g_.payoffs_d.push_back(std::move(d));
    }
    return idx;
  }

  std::uint32_t intern_prob(const Rational& p) {
    auto it = prob_ids_.find(to_string(p));
    if (it != prob_ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(g_.probs.size());
    g_.probs.push_back(p);
    g_.probs_d.push_back(to_double(p));
    prob_ids_.emplace(to_string(p), id);
    return id;
  }

  std::uint32_t symbol(const std::string& s) { return g_.symbols.intern(s); }
  std::uint32_t observation(const std::vector<std::uint32_t>& tokens) { return g_.observations.intern(tokens); }

  /** Sets label, observation vector index and (for chance edges) probability of an edge. */
  void set_edge(std::uint64_t e, std::uint32_t label_sym, std::uint32_t obs, const Rational* prob = nullptr) {
    g_.label[e] = label_sym;
    g_.observation[e] = obs;
    if (prob) g_.prob_index[e] = intern_prob(*prob);
  }
  void set_edge_prob_index(std::uint64_t e, std::uint32_t label_sym, std::uint32_t obs, std::uint32_t prob_idx) {
    g_.label[e] = label_sym;
    g_.observation[e] = obs;
    g_.prob_index[e] = prob_idx;
  }

  void set_private(NodeId h, PlayerId p, std::uint8_t state, std::uint16_t pool) {
    g_.private_state[h * g_.num_players() + p] = state;
    g_.private_pool[h * g_.num_players() + p] = pool;
  }

  std::uint64_t edge(NodeId h, std::size_t a) const { return g_.edge_begin[h] + a; }
  GameTree& game() { return g_; }

  static constexpr std::uint64_t kNoEdge = std::numeric_limits<std::uint64_t>::max();

 private:
  GameTree& g_;
  bool record_private_;
  std::vector<NodeId> parent_of_edge_;
  std::unordered_map<std::string, std::uint32_t> prob_ids_;
};

/** Observation vector where every non-chance player sees `sym`. */
inline std::vector<std::uint32_t> public_tokens(const GameTree& g, std::uint32_t sym) {
  std::vector<std::uint32_t> t(g.num_players(), sym);
  t[kChance] = kHidden;
  return t;
}

/** Node counts by category. */
struct NodeCounts {
  std::uint64_t total = 0, chance = 0, terminal = 0;
  std::vector<std::uint64_t> decision_by_player;
};

inline NodeCounts count_nodes(const GameTree& g) {
  NodeCounts c;
  c.total = g.num_nodes();
  c.decision_by_player.assign(g.num_players(), 0);
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    switch (g.kind[h]) {
      case NodeKind::Chance: ++c.chance; break;
      case NodeKind::Terminal: ++c.terminal; break;
      case NodeKind::Decision: ++c.decision_by_player[g.actor[h]]; break;
    }
  }
  return c;
}

}  // namespace teamgame

#pragma once

// Team-game to two-player zero-sum transformations.
//
//  * MPTA: every team decision node gains a dummy parent whose actions
//    enumerate the teammates' possible private states; the node's subtree is
//    replicated under each dummy action and a coordinator acts in place of the
//    team member.
//  * TPICA: at every team decision the coordinator picks a prescription (one
//    action per infoset of the acting member in the current team public
//    state); a one-outcome dummy then forwards the prescribed action.
//
// The coordinator receives the sum of the team members' payoffs and the
// opponent its negation.

#include "teamgame/infosets.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace teamgame {

enum class Method { Mpta, Tpica };
enum class InfosetRule { A, B };
enum class DummyOwnership { ChanceUniform, CoordinatorOwned };

inline const char* method_name(Method m) { return m == Method::Mpta ? "mpta" : "tpica"; }
inline const char* rule_name(InfosetRule r) { return r == InfosetRule::A ? "rule-A" : "rule-B"; }
inline const char* ownership_name(DummyOwnership o) {
  return o == DummyOwnership::ChanceUniform ? "chance-uniform" : "coordinator-owned";
}

inline Method parse_method(const std::string& s) {
  if (s == "mpta") return Method::Mpta;
  if (s == "tpica") return Method::Tpica;
  throw std::invalid_argument("unknown transform method '" + s + "'");
}
inline InfosetRule parse_rule(const std::string& s) {
  if (s == "rule-A" || s == "A" || s == "a") return InfosetRule::A;
  if (s == "rule-B" || s == "B" || s == "b") return InfosetRule::B;
  throw std::invalid_argument("unknown coordinator infoset rule '" + s + "'");
}
inline DummyOwnership parse_ownership(const std::string& s) {
  if (s == "chance-uniform") return DummyOwnership::ChanceUniform;
  if (s == "coordinator-owned") return DummyOwnership::CoordinatorOwned;
  throw std::invalid_argument("unknown dummy ownership '" + s + "'");
}

struct TransformConfig {
  Method method = Method::Mpta;
  InfosetRule rule = InfosetRule::B;
  DummyOwnership ownership = DummyOwnership::ChanceUniform;
  std::uint64_t node_budget = 60'000'000;  // refuse to materialize larger outputs
  bool check_preconditions = true;
};

/** Node-count accounting of a (projected or constructed) transformed game. */
struct TransformReport {
  std::string method;
  std::string rule;
  std::string ownership;
  std::uint64_t total = 0, coordinator = 0, adversary = 0, dummy = 0, chance = 0, terminal = 0;
  Rational scale_factor = 1;  // transformed payoff = scale * original team payoff (expected value)
  std::map<std::uint64_t, std::uint64_t> episode_sizes;  // episode size -> number of episodes
  std::uint64_t max_episode_bound = 0;                   // analytic per-episode bound used for checking

  bool accounting_ok() const { return total == coordinator + adversary + dummy + chance + terminal; }
};

/** Per-node link from a transformed game back to the original game. */
struct Lineage {
  std::vector<NodeId> origin;               // original node (dummies: the guarded team node)
  std::vector<std::uint32_t> dummy_choice;  // coordinator nodes: outcome index of the guarding dummy
  std::vector<std::uint8_t> is_dummy;
  std::vector<PlayerId> member;             // coordinator nodes / dummies: original acting team member

  void push(NodeId o, std::uint32_t choice, bool dummy, PlayerId m) {
    origin.push_back(o);
    dummy_choice.push_back(choice);
    is_dummy.push_back(dummy ? 1 : 0);
    member.push_back(m);
  }
};

inline constexpr PlayerId kOpponent2p = 1;
inline constexpr PlayerId kCoordinator2p = 2;
inline constexpr std::uint32_t kNoChoice = std::numeric_limits<std::uint32_t>::max();

struct TransformResult {
  GameTree game;
  TransformReport report;
  Lineage lineage;
  InfoSetPartition partition;  // coordinator/opponent infosets for the selected rule
};

// ---------------------------------------------------------------------------
// Episode-size formulas

inline BigInt falling_ratio(int omega, int team) {
  // (omega-1)! / (omega-team)!
  BigInt r = 1;
  for (int x = omega - team + 1; x <= omega - 1; ++x) r *= x;
  return r;
}

inline void check_episode_args(int omega, int team, int actions) {
  if (team < 1 || actions < 1 || omega < 1) throw std::invalid_argument("episode size needs positive arguments");
  if (team > omega) throw std::invalid_argument("team larger than the private-state alphabet");
}

/** Sum over n = 1..|T| of R^n (|A|^(n-1) + |A|^n) for an explicit dummy fan-out R. */
inline BigInt episode_bound(const BigInt& r, int team, int actions) {
  BigInt total = 0, rn = 1, an1 = 1;  // R^n, A^(n-1)
  for (int n = 1; n <= team; ++n) {
    rn *= r;
    total += rn * (an1 + an1 * actions);
    an1 *= actions;
  }
  return total;
}

/** MPTA episode size with R = (|Omega|-1)!/(|Omega|-|T|)!. */
inline BigInt mpta_episode_size(int omega, int team, int actions) {
  check_episode_args(omega, team, actions);
  return episode_bound(falling_ratio(omega, team), team, actions);
}

/** Geometric-series closed form of mpta_episode_size. */
inline BigInt mpta_episode_size_closed(int omega, int team, int actions) {
  check_episode_args(omega, team, actions);
  const BigInt r = falling_ratio(omega, team);
  const BigInt q = r * actions;
  if (q == 1) return BigInt(team) * (1 + actions) * r;
  return (1 + actions) * r * (boost::multiprecision::pow(q, static_cast<unsigned>(team)) - 1) / (q - 1);
}

/** 2 * sum over n = 1..|T| of (|A|^|Omega|)^n. */
inline BigInt tpica_episode_size(int omega, int team, int actions) {
  check_episode_args(omega, team, actions);
  const BigInt p = boost::multiprecision::pow(BigInt(actions), static_cast<unsigned>(omega));
  BigInt total = 0, pn = 1;
  for (int n = 1; n <= team; ++n) {
    pn *= p;
    total += pn;
  }
  return 2 * total;
}

inline BigInt tpica_episode_size_closed(int omega, int team, int actions) {
  check_episode_args(omega, team, actions);
  const BigInt p = boost::multiprecision::pow(BigInt(actions), static_cast<unsigned>(omega));
  if (p == 1) return BigInt(2 * team);
  return 2 * p * (boost::multiprecision::pow(p, static_cast<unsigned>(team)) - 1) / (p - 1);
}

// ---------------------------------------------------------------------------

namespace detail {

/** Saturating node counters used for size projection without construction. */
struct Counts {
  using U = unsigned __int128;
  U total = 0, coordinator = 0, adversary = 0, dummy = 0, chance = 0, terminal = 0;
  static U sat_add(U a, U b) { return a > ~U(0) - b ? ~U(0) : a + b; }
  static U sat_mul(U a, std::uint64_t k) { return (k != 0 && a > ~U(0) / k) ? ~U(0) : a * k; }
  Counts& operator+=(const Counts& o) {
    total = sat_add(total, o.total);
    coordinator = sat_add(coordinator, o.coordinator);
    adversary = sat_add(adversary, o.adversary);
    dummy = sat_add(dummy, o.dummy);
    chance = sat_add(chance, o.chance);
    terminal = sat_add(terminal, o.terminal);
    return *this;
  }
  Counts scaled(std::uint64_t k) const {
    Counts c;
    c.total = sat_mul(total, k);
    c.coordinator = sat_mul(coordinator, k);
    c.adversary = sat_mul(adversary, k);
    c.dummy = sat_mul(dummy, k);
    c.chance = sat_mul(chance, k);
    c.terminal = sat_mul(terminal, k);
    return c;
  }
};

inline BigInt to_big(unsigned __int128 v) {
  BigInt r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

inline std::string omega_label(const GameTree& g, std::uint8_t s) {
  return s < g.omega.size() ? g.omega[s] : std::to_string(s);
}

/** Shared structure for both transforms. */
class TransformBase {
 public:
  TransformBase(const GameTree& g, const TransformConfig& cfg) : g_(g), cfg_(cfg) {
    if (g.num_players() < 2) throw ValidationError("game has no strategic players");
    opponents_ = g.players_with_role(Role::Opponent);
    team_ = g.players_with_role(Role::Team);
    if (opponents_.size() != 1) throw ValidationError("transforms need exactly one opponent");
    if (team_.size() < 2) throw ValidationError("transforms need a team of at least two members");
    if (cfg.check_preconditions) {
      const auto tt = validate_public_turn_taking(g);
      if (!tt.ok()) throw ValidationError("input is not public-turn-taking: " + tt.summary(1));
    }
    part_ = compute_infosets(g);
    if (cfg.check_preconditions)
      for (std::size_t p = 1; p < g.num_players(); ++p) {
        const auto pr = validate_perfect_recall(g, part_, static_cast<PlayerId>(p));
        if (!pr.ok()) throw ValidationError("input violates perfect recall: " + pr.summary(1));
      }
  }

  const InfoSetPartition& original_partition() const { return part_; }

 protected:
  void init_output(GameTree& out) {
    out.players = {{"chance", Role::Chance},
                   {g_.players[opponents_[0]].name, Role::Opponent},
                   {"coordinator", Role::Coordinator}};
    out.omega = g_.omega;
    sym_map_.assign(g_.symbols.size(), kNoSym);
    obs_map_.assign(g_.observations.size(), kNoSym);
  }

  std::uint32_t map_symbol(TreeBuilder& b, std::uint32_t s) {
    if (s >= sym_map_.size()) return b.symbol(g_.symbols[s]);
    if (sym_map_[s] == kNoSym) sym_map_[s] = b.symbol(g_.symbols[s]);
    return sym_map_[s];
  }

  /** Opponent keeps its token; the coordinator sees what every team member sees identically. */
  std::uint32_t map_observation(TreeBuilder& b, std::uint32_t obs) {
    if (obs_map_[obs] != kNoSym) return obs_map_[obs];
    const auto& old = g_.observations[obs];
    std::vector<std::uint32_t> t(3, kHidden);
    if (old[opponents_[0]] != kHidden) t[kOpponent2p] = map_symbol(b, old[opponents_[0]]);
    std::uint32_t common = old[team_[0]];
    for (PlayerId p : team_)
      if (old[p] != common) common = kHidden;
    if (common != kHidden) t[kCoordinator2p] = map_symbol(b, common);
    return obs_map_[obs] = b.observation(t);
  }

  std::vector<Rational> coordinator_payoff(NodeId z) const {
    Rational ut = 0;
    for (PlayerId p : team_) ut += g_.payoff(z)[p];
    return {Rational(0), -ut, ut};
  }

  /** Copies the edges of original node h onto new node n (labels, visibility, probabilities). */
  void copy_edges(TreeBuilder& b, NodeId h, NodeId n) {
    for (std::size_t a = 0; a < g_.num_actions[h]; ++a) {
      const auto e = g_.edge(h, a);
      const Rational* p = g_.kind[h] == NodeKind::Chance ? &g_.chance_prob_exact(e) : nullptr;
      b.set_edge(b.edge(n, a), map_symbol(b, g_.label[e]), map_observation(b, g_.observation[e]), p);
    }
  }

  void check_budget(const Counts& c) const {
    if (c.total > cfg_.node_budget) {
      const BigInt projected = to_big(c.total);
      throw ResourceError(std::string(method_name(cfg_.method)) + " output would have " + projected.str() +
                              " nodes, above the budget of " + std::to_string(cfg_.node_budget),
                          projected);
    }
  }

  static void fill_report(TransformReport& r, const GameTree& out, const Lineage& lin) {
    r.total = out.num_nodes();
    r.coordinator = r.adversary = r.dummy = r.chance = r.terminal = 0;
    for (NodeId h = 0; h < out.num_nodes(); ++h) {
      if (lin.is_dummy[h]) ++r.dummy;
      else if (out.kind[h] == NodeKind::Terminal) ++r.terminal;
      else if (out.kind[h] == NodeKind::Chance) ++r.chance;
      else if (out.actor[h] == kCoordinator2p) ++r.coordinator;
      else ++r.adversary;
    }
  }

  static constexpr std::uint32_t kNoSym = std::numeric_limits<std::uint32_t>::max();
  const GameTree& g_;
  TransformConfig cfg_;
  std::vector<PlayerId> opponents_, team_;
  InfoSetPartition part_;
  std::vector<std::uint32_t> sym_map_, obs_map_;
};

// Episode sizes: nodes strictly below an episode root (first team-segment node
// entered from a non-team node) down to and including the exit nodes.
inline std::map<std::uint64_t, std::uint64_t> episode_sizes(const GameTree& out, const Lineage& lin) {
  auto in_team_segment = [&](NodeId h) {
    return lin.is_dummy[h] || (out.kind[h] == NodeKind::Decision && out.actor[h] == kCoordinator2p);
  };
  std::map<std::uint64_t, std::uint64_t> hist;
  for (NodeId h = 0; h < out.num_nodes(); ++h) {
    if (!in_team_segment(h)) continue;
    if (h != 0 && in_team_segment(out.parent[h])) continue;
    std::uint64_t size = 0;
    std::vector<NodeId> stack{h};
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      for (std::size_t a = 0; a < out.num_actions[x]; ++a) {
        const NodeId c = out.child_of(x, a);
        ++size;
        if (in_team_segment(c)) stack.push_back(c);
      }
    }
    ++hist[size];
  }
  return hist;
}

class MptaBuilder : public TransformBase {
 public:
  using TransformBase::TransformBase;

  /** Dummy alphabet at team node h (labels of the teammates' private-state assignments). */
  std::vector<std::string> alphabet(NodeId h) const {
    const PlayerId actor = g_.actor[h];
    std::vector<PlayerId> others;
    for (PlayerId p : team_)
      if (p != actor) others.push_back(p);
    std::vector<std::string> out;
    const std::uint8_t own = g_.state_of(h, actor);
    if (!g_.has_private_info())
      throw ValidationError("team node " + std::to_string(h) + ": private states cannot be identified");
    if (own != kNoState) {
      // static private states: ordered assignments of distinct states from omega minus the actor's
      std::vector<std::uint8_t> pool;
      for (std::size_t s = 0; s < g_.omega.size(); ++s)
        if (s != own) pool.push_back(static_cast<std::uint8_t>(s));
      if (pool.size() < others.size())
        throw ValidationError("team node " + std::to_string(h) + ": private-state alphabet too small for the team");
      std::vector<bool> used(pool.size(), false);
      std::string cur;
      auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == others.size()) {
          out.push_back("h:" + cur);
          return;
        }
        for (std::size_t k = 0; k < pool.size(); ++k) {
          if (used[k]) continue;
          used[k] = true;
          const auto save = cur.size();
          cur += (i ? "," : "") + omega_label(g_, pool[k]);
          self(self, i + 1);
          cur.resize(save);
          used[k] = false;
        }
      };
      rec(rec, 0);
    } else {
      // dynamic private states: every combination from each teammate's consistent pool
      std::string cur;
      auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == others.size()) {
          out.push_back("h:" + cur);
          return;
        }
        const auto pool = g_.pool_of(h, others[i]);
        for (std::size_t s = 0; s < 16; ++s) {
          if (!(pool & (1u << s))) continue;
          const auto save = cur.size();
          cur += (i ? "," : "") + omega_label(g_, static_cast<std::uint8_t>(s));
          self(self, i + 1);
          cur.resize(save);
        }
      };
      rec(rec, 0);
    }
    if (out.empty())
      throw ValidationError("team node " + std::to_string(h) + ": no consistent teammate private states");
    return out;
  }

  Counts project() {
    memo_.assign(g_.num_nodes(), std::nullopt);
    return count(0);
  }

  TransformResult build() {
    const Counts projected = project();
    check_budget(projected);
    TransformResult res;
    init_output(res.game);
    TreeBuilder b(res.game);
    res.game.kind.reserve(static_cast<std::size_t>(projected.total));
    b_ = &b;
    lin_ = &res.lineage;
    emit(0, TreeBuilder::kNoEdge);
    res.game.validate();
    res.report.method = "mpta";
    res.report.rule = rule_name(cfg_.rule);
    res.report.ownership = ownership_name(cfg_.ownership);
    fill_report(res.report, res.game, res.lineage);
    res.report.episode_sizes = episode_sizes(res.game, res.lineage);
    int max_actions = 1;
    for (NodeId h = 0; h < g_.num_nodes(); ++h)
      if (g_.kind[h] == NodeKind::Decision) max_actions = std::max<int>(max_actions, g_.num_actions[h]);
    const BigInt bound = episode_bound(BigInt(max_r_), static_cast<int>(team_.size()), max_actions);
    res.report.max_episode_bound =
        bound > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                           : static_cast<std::uint64_t>(bound);
    res.partition = coordinator_partition(res.game, res.lineage, cfg_.rule);
    return res;
  }

  /** Coordinator infosets per rule; opponent infosets follow the original opponent infosets. */
  InfoSetPartition coordinator_partition(const GameTree& out, const Lineage& lin, InfosetRule rule) const {
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
    return partition_by_key(out, [&](NodeId h) -> Key {
      const NodeId o = lin.origin[h];
      if (out.actor[h] == kOpponent2p) return {0, part_.of(o), 0};
      if (lin.is_dummy[h]) {
        // coordinator-owned dummies: decided knowing what the guarded node's infoset knows
        return rule == InfosetRule::A ? Key{1, o, 0} : Key{1, part_.of(o), 0};
      }
      if (rule == InfosetRule::A) return {2, o, 0};
      return {3, part_.of(o), lin.dummy_choice[h]};
    });
  }

 private:
  Counts count(NodeId h) {
    if (memo_[h]) return *memo_[h];
    Counts c;
    switch (g_.kind[h]) {
      case NodeKind::Terminal: c.total = c.terminal = 1; break;
      case NodeKind::Chance:
      case NodeKind::Decision: {
        Counts below;
        for (std::size_t a = 0; a < g_.num_actions[h]; ++a) below += count(g_.child_of(h, a));
        if (g_.kind[h] == NodeKind::Chance) {
          c = below;
          c.total = Counts::sat_add(c.total, 1);
          c.chance = Counts::sat_add(c.chance, 1);
        } else if (!g_.is_team(g_.actor[h])) {
          c = below;
          c.total = Counts::sat_add(c.total, 1);
          c.adversary = Counts::sat_add(c.adversary, 1);
        } else {
          const auto r = alphabet(h).size();
          max_r_ = std::max<std::uint64_t>(max_r_, r);
          Counts one = below;
          one.total = Counts::sat_add(one.total, 1);
          one.coordinator = Counts::sat_add(one.coordinator, 1);
          c = one.scaled(r);
          c.total = Counts::sat_add(c.total, 1);
          c.dummy = Counts::sat_add(c.dummy, 1);
        }
        break;
      }
    }
    memo_[h] = c;
    return c;
  }

  void emit(NodeId h, std::uint64_t in_edge) {
    TreeBuilder& b = *b_;
    switch (g_.kind[h]) {
      case NodeKind::Terminal:
        b.add_terminal(coordinator_payoff(h), in_edge);
        lin_->push(h, kNoChoice, false, kChance);
        return;
      case NodeKind::Chance:
      case NodeKind::Decision:
        break;
    }
    const auto k = g_.num_actions[h];
    if (g_.kind[h] == NodeKind::Chance || !g_.is_team(g_.actor[h])) {
      const bool chance = g_.kind[h] == NodeKind::Chance;
      const NodeId n = b.add_node(g_.kind[h], chance ? kChance : kOpponent2p, k, in_edge);
      lin_->push(h, kNoChoice, false, kChance);
      copy_edges(b, h, n);
      for (std::size_t a = 0; a < k; ++a) emit(g_.child_of(h, a), b.edge(n, a));
      return;
    }
    const auto labels = alphabet(h);
    const auto r = labels.size();
    const bool chance_dummy = cfg_.ownership == DummyOwnership::ChanceUniform;
    const NodeId d = b.add_node(chance_dummy ? NodeKind::Chance : NodeKind::Decision,
                                chance_dummy ? kChance : kCoordinator2p, r, in_edge);
    lin_->push(h, kNoChoice, true, g_.actor[h]);
    const Rational p(1, static_cast<long long>(r));
    std::vector<std::uint32_t> tokens(3, kHidden);
    for (std::size_t j = 0; j < r; ++j) {
      const auto sym = b.symbol(labels[j]);
      tokens[kCoordinator2p] = sym;
      b.set_edge(b.edge(d, j), sym, b.observation(tokens), chance_dummy ? &p : nullptr);
    }
    for (std::size_t j = 0; j < r; ++j) {
      const NodeId n = b.add_node(NodeKind::Decision, kCoordinator2p, k, b.edge(d, j));
      lin_->push(h, static_cast<std::uint32_t>(j), false, g_.actor[h]);
      copy_edges(b, h, n);
      for (std::size_t a = 0; a < k; ++a) emit(g_.child_of(h, a), b.edge(n, a));
    }
  }

  std::vector<std::optional<Counts>> memo_;
  std::uint64_t max_r_ = 1;
  TreeBuilder* b_ = nullptr;
  Lineage* lin_ = nullptr;
};

class TpicaBuilder : public TransformBase {
 public:
  TpicaBuilder(const GameTree& g, const TransformConfig& cfg) : TransformBase(g, cfg) {
    public_ = compute_public_states(g, part_, team_);
    // infosets of each acting member per team public state, in id order
    for (const auto& is : part_.infosets) {
      if (!g.is_team(is.player)) continue;
      const auto s = public_.node_state[is.nodes.front()];
      groups_[{s, is.player}].push_back(static_cast<std::uint32_t>(&is - part_.infosets.data()));
    }
  }

  /** Infosets of the acting member in h's team public state, and h's index among them. */
  std::pair<const std::vector<std::uint32_t>*, std::size_t> prescription_slots(NodeId h) const {
    const auto& list = groups_.at({public_.node_state[h], g_.actor[h]});
    const auto it = std::find(list.begin(), list.end(), part_.of(h));
    return {&list, static_cast<std::size_t>(it - list.begin())};
  }

  std::uint64_t prescription_count(NodeId h) const {
    const auto [list, idx] = prescription_slots(h);
    (void)idx;
    unsigned __int128 p = 1;
    for (auto i : *list) {
      p *= part_.infosets[i].num_actions();
      if (p > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("prescription alphabet too large at node " + std::to_string(h), to_big(p));
    }
    return static_cast<std::uint64_t>(p);
  }

  Counts project() {
    memo_.assign(g_.num_nodes(), std::nullopt);
    return count(0);
  }

  TransformResult build() {
    const Counts projected = project();
    check_budget(projected);
    TransformResult res;
    init_output(res.game);
    TreeBuilder b(res.game);
    res.game.kind.reserve(static_cast<std::size_t>(projected.total));
    b_ = &b;
    lin_ = &res.lineage;
    emit(0, TreeBuilder::kNoEdge);
    res.game.validate();
    res.report.method = "tpica";
    res.report.rule = "public-state";
    res.report.ownership = "chance-forwarding";
    fill_report(res.report, res.game, res.lineage);
    res.report.episode_sizes = episode_sizes(res.game, res.lineage);
    int max_actions = 1;
    for (NodeId h = 0; h < g_.num_nodes(); ++h)
      if (g_.kind[h] == NodeKind::Decision) max_actions = std::max<int>(max_actions, g_.num_actions[h]);
    const int omega = std::max<int>(static_cast<int>(g_.omega.size()), static_cast<int>(team_.size()));
    const BigInt bound = tpica_episode_size(omega, static_cast<int>(team_.size()), max_actions);
    res.report.max_episode_bound =
        bound > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                           : static_cast<std::uint64_t>(bound);
    res.partition = compute_infosets(res.game);
    return res;
  }

 private:
  Counts count(NodeId h) {
    if (memo_[h]) return *memo_[h];
    Counts c;
    if (g_.kind[h] == NodeKind::Terminal) {
      c.total = c.terminal = 1;
    } else if (g_.kind[h] == NodeKind::Chance || !g_.is_team(g_.actor[h])) {
      for (std::size_t a = 0; a < g_.num_actions[h]; ++a) c += count(g_.child_of(h, a));
      c.total = Counts::sat_add(c.total, 1);
      if (g_.kind[h] == NodeKind::Chance) c.chance = Counts::sat_add(c.chance, 1);
      else c.adversary = Counts::sat_add(c.adversary, 1);
    } else {
      // each prescription adds a forwarding dummy and the designated child's subtree;
      // prescriptions split evenly over the actions of h's own infoset
      const auto p = prescription_count(h);
      const auto k = g_.num_actions[h];
      for (std::size_t a = 0; a < k; ++a) {
        Counts branch = count(g_.child_of(h, a));
        branch.total = Counts::sat_add(branch.total, 1);
        branch.dummy = Counts::sat_add(branch.dummy, 1);
        c += branch.scaled(p / k);
      }
      c.total = Counts::sat_add(c.total, 1);
      c.coordinator = Counts::sat_add(c.coordinator, 1);
    }
    memo_[h] = c;
    return c;
  }

  void emit(NodeId h, std::uint64_t in_edge) {
    TreeBuilder& b = *b_;
    if (g_.kind[h] == NodeKind::Terminal) {
      b.add_terminal(coordinator_payoff(h), in_edge);
      lin_->push(h, kNoChoice, false, kChance);
      return;
    }
    const auto k = g_.num_actions[h];
    if (g_.kind[h] == NodeKind::Chance || !g_.is_team(g_.actor[h])) {
      const bool chance = g_.kind[h] == NodeKind::Chance;
      const NodeId n = b.add_node(g_.kind[h], chance ? kChance : kOpponent2p, k, in_edge);
      lin_->push(h, kNoChoice, false, kChance);
      copy_edges(b, h, n);
      for (std::size_t a = 0; a < k; ++a) emit(g_.child_of(h, a), b.edge(n, a));
      return;
    }
    const auto [list, own] = prescription_slots(h);
    const auto p = prescription_count(h);
    const NodeId c = b.add_node(NodeKind::Decision, kCoordinator2p, p, in_edge);
    lin_->push(h, kNoChoice, false, g_.actor[h]);
    std::vector<std::size_t> designated(p);
    std::vector<std::uint32_t> tokens(3, kHidden);
    for (std::uint64_t q = 0; q < p; ++q) {
      // mixed radix, first infoset most significant
      std::string label = "p:";
      std::uint64_t rest = q, radix = p;
      for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& is = part_.infosets[(*list)[i]];
        radix /= is.num_actions();
        const auto digit = rest / radix;
        rest %= radix;
        if (i) label += ".";
        label += g_.symbols[is.labels[digit]];
        if (i == own) designated[q] = digit;
      }
      const auto sym = b.symbol(label);
      tokens[kCoordinator2p] = sym;
      b.set_edge(b.edge(c, q), sym, b.observation(tokens));
    }
    const Rational one = 1;
    for (std::uint64_t q = 0; q < p; ++q) {
      const NodeId d = b.add_node(NodeKind::Chance, kChance, 1, b.edge(c, q));
      lin_->push(h, static_cast<std::uint32_t>(q), true, g_.actor[h]);
      const auto e = g_.edge(h, designated[q]);
      b.set_edge(b.edge(d, 0), map_symbol(b, g_.label[e]), map_observation(b, g_.observation[e]), &one);
      emit(g_.child_of(h, designated[q]), b.edge(d, 0));
    }
  }

  PublicStatePartition public_;
  std::map<std::pair<std::uint32_t, PlayerId>, std::vector<std::uint32_t>> groups_;
  std::vector<std::optional<Counts>> memo_;
  TreeBuilder* b_ = nullptr;
  Lineage* lin_ = nullptr;
};

inline TransformReport report_from_counts(const Counts& c, const char* method, const TransformConfig& cfg) {
  auto clamp = [](Counts::U v) {
    return v > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                         : static_cast<std::uint64_t>(v);
  };
  TransformReport r;
  r.method = method;
  r.rule = cfg.method == Method::Mpta ? rule_name(cfg.rule) : "public-state";
  r.ownership = cfg.method == Method::Mpta ? ownership_name(cfg.ownership) : "chance-forwarding";
  r.total = clamp(c.total);
  r.coordinator = clamp(c.coordinator);
  r.adversary = clamp(c.adversary);
  r.dummy = clamp(c.dummy);
  r.chance = clamp(c.chance);
  r.terminal = clamp(c.terminal);
  return r;
}

}  // namespace detail

/** MPTA transform with coordinator infosets for the configured rule. */
inline TransformResult mpta(const GameTree& g, TransformConfig cfg = {}) {
  cfg.method = Method::Mpta;
  return detail::MptaBuilder(g, cfg).build();
}

/** TPICA prescription baseline. */
inline TransformResult tpica(const GameTree& g, TransformConfig cfg = {}) {
  cfg.method = Method::Tpica;
  return detail::TpicaBuilder(g, cfg).build();
}

inline TransformResult transform(const GameTree& g, const TransformConfig& cfg) {
  return cfg.method == Method::Mpta ? mpta(g, cfg) : tpica(g, cfg);
}

/** Exact node counts of the transform output without materializing it. */
inline TransformReport project_transform(const GameTree& g, TransformConfig cfg) {
  cfg.check_preconditions = false;
  if (cfg.method == Method::Mpta) {
    detail::MptaBuilder b(g, cfg);
    return detail::report_from_counts(b.project(), "mpta", cfg);
  }
  detail::TpicaBuilder b(g, cfg);
  return detail::report_from_counts(b.project(), "tpica", cfg);
}

/** Re-derives coordinator/opponent infosets of an MPTA output for `rule`. */
inline InfoSetPartition build_coordinator_infosets(const GameTree& original, const TransformResult& t,
                                                   InfosetRule rule) {
  TransformConfig cfg;
  cfg.check_preconditions = false;
  detail::MptaBuilder b(original, cfg);
  auto part = b.coordinator_partition(t.game, t.lineage, rule);
  const auto pr = validate_perfect_recall(t.game, part, kCoordinator2p);
  (void)pr;  // reported separately by callers; a violation is a calibration signal
  return part;
}

/** Structural checks of a transform output (accounting and uniform replication). */
inline Diagnostics check_transform_invariants(const TransformResult& t) {
  Diagnostics d;
  const auto& g = t.game;
  if (!t.report.accounting_ok()) d.problems.push_back("category counts do not sum to the total");
  if (t.report.total != g.num_nodes()) d.problems.push_back("report total differs from the node count");
  // uniform replication: terminals sharing a public action sequence see the same number of dummies
  const auto in = incoming_edges(g);
  std::vector<std::uint32_t> seq(g.num_nodes(), SequenceTrie::kEmpty), dummies(g.num_nodes(), 0);
  SequenceTrie trie;
  const std::vector<PlayerId> both{kOpponent2p, kCoordinator2p};
  std::unordered_map<std::uint32_t, std::uint32_t> seen;
  for (NodeId h = 1; h < g.num_nodes(); ++h) {
    const NodeId par = g.parent[h];
    const auto tok = detail::public_token(g, in[h], both);
    seq[h] = tok == kHidden ? seq[par] : trie.extend(seq[par], tok);
    dummies[h] = dummies[par] + (t.lineage.is_dummy[par] ? 1 : 0);
    if (g.kind[h] != NodeKind::Terminal) continue;
    auto [it, inserted] = seen.try_emplace(seq[h], dummies[h]);
    if (!inserted && it->second != dummies[h]) {
      d.problems.push_back("terminal " + std::to_string(h) + " passes " + std::to_string(dummies[h]) +
                           " dummies, another terminal with the same public history passes " +
                           std::to_string(it->second));
      if (d.problems.size() > 20) break;
    }
  }
  return d;
}

/** Episodes whose constructed size exceeds the analytic per-episode bound. */
inline Diagnostics check_episode_bounds(const TransformReport& r) {
  Diagnostics d;
  for (const auto& [size, n] : r.episode_sizes)
    if (size > r.max_episode_bound)
      d.problems.push_back(std::to_string(n) + " episode(s) of size " + std::to_string(size) +
                           " exceed the analytic bound " + std::to_string(r.max_episode_bound));
  return d;
}

}  // namespace teamgame

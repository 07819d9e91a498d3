#pragma once

// Information sets, public states and structural validators.
//
// A player's observation sequence at a node is the list of tokens the player
// received along the root path.  Actions the player cannot observe contribute
// an anonymous occurrence marker (the player knows that *something* happened,
// not what), which keeps histories of different lengths apart.

#include "teamgame/game_tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace teamgame {

inline constexpr std::uint32_t kNoInfoSet = std::numeric_limits<std::uint32_t>::max();

struct InfoSet {
  PlayerId player = 0;
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> labels;  // shared action labels (symbol ids)
  std::size_t num_actions() const { return labels.size(); }
};

/** Grouping of the decision nodes of each player into information sets. */
struct InfoSetPartition {
  std::vector<std::uint32_t> node_infoset;  // kNoInfoSet for chance / terminal nodes
  std::vector<InfoSet> infosets;
  std::vector<std::vector<std::uint32_t>> by_player;

  std::uint32_t of(NodeId h) const { return node_infoset[h]; }
  std::size_t size() const { return infosets.size(); }
};

/** Grouping of nodes into public states for a designated player set. */
struct PublicStatePartition {
  std::vector<PlayerId> playerset;
  std::vector<std::uint32_t> node_state;  // kNoInfoSet for nodes outside the partition
  std::vector<std::vector<NodeId>> states;
};

/** Dense ids for token sequences: id(seq + [token]) from id(seq). */
class SequenceTrie {
 public:
  std::uint32_t extend(std::uint32_t seq, std::uint32_t token) {
    const std::uint64_t key = (static_cast<std::uint64_t>(seq) << 32) | token;
    auto [it, inserted] = next_.try_emplace(key, count_);
    if (inserted) ++count_;
    return it->second;
  }
  static constexpr std::uint32_t kEmpty = 0;

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> next_;
  std::uint32_t count_ = 1;
};

/** Incoming edge index of every node (kNoEdge for the root). */
inline std::vector<std::uint64_t> incoming_edges(const GameTree& g) {
  std::vector<std::uint64_t> in(g.num_nodes(), std::numeric_limits<std::uint64_t>::max());
  for (NodeId h = 0; h < g.num_nodes(); ++h)
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) in[g.child_of(h, a)] = g.edge(h, a);
  return in;
}

namespace detail {

struct KeyHash {
  std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& k) const {
    auto [a, b, c] = k;
    return (static_cast<std::size_t>(a) * 0x9e3779b97f4a7c15ull) ^ (static_cast<std::size_t>(b) << 17) ^
           (static_cast<std::size_t>(c) * 0xbf58476d1ce4e5b9ull);
  }
};

/** Observation-sequence id per (node, player), pre-order pass. */
inline std::vector<std::uint32_t> observation_sequences(const GameTree& g) {
  const std::size_t np = g.num_players();
  std::vector<std::uint32_t> seq(g.num_nodes() * np, SequenceTrie::kEmpty);
  SequenceTrie trie;
  const auto in = incoming_edges(g);
  for (NodeId h = 1; h < g.num_nodes(); ++h) {
    const NodeId par = g.parent[h];
    const auto e = in[h];
    for (std::size_t p = 1; p < np; ++p)
      seq[h * np + p] = trie.extend(seq[par * np + p], g.token(e, static_cast<PlayerId>(p)));
  }
  return seq;
}

inline std::uint32_t public_token(const GameTree& g, std::uint64_t e, const std::vector<PlayerId>& playerset) {
  const std::uint32_t t = g.token(e, playerset.front());
  if (t == kHidden) return kHidden;
  for (PlayerId p : playerset)
    if (g.token(e, p) != t) return kHidden;
  return t;
}

}  // namespace detail

/**
 * Derives information sets from visibility: two decision nodes of the same
 * player share an infoset iff the player's observation sequences and the
 * available action lists coincide.  Infoset ids follow pre-order of first node.
 */
inline InfoSetPartition compute_infosets(const GameTree& g) {
  g.validate();
  const std::size_t np = g.num_players();
  const auto seq = detail::observation_sequences(g);
  InfoSetPartition part;
  part.node_infoset.assign(g.num_nodes(), kNoInfoSet);
  part.by_player.assign(np, {});
  Interner<std::vector<std::uint32_t>, VectorHash> signatures;
  std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint32_t, detail::KeyHash> ids;
  std::vector<std::uint32_t> labels;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] != NodeKind::Decision) continue;
    const PlayerId p = g.actor[h];
    labels.clear();
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) labels.push_back(g.label[g.edge(h, a)]);
    const auto sig = signatures.intern(labels);
    auto [it, inserted] = ids.try_emplace({p, seq[h * np + p], sig}, static_cast<std::uint32_t>(part.infosets.size()));
    if (inserted) {
      part.infosets.push_back(InfoSet{p, {}, labels});
      part.by_player[p].push_back(it->second);
    }
    part.infosets[it->second].nodes.push_back(h);
    part.node_infoset[h] = it->second;
  }
  return part;
}

/**
 * Builds a partition from an arbitrary per-node key (decision nodes only).
 * Used for coordinator infoset rules that are not visibility-derived.
 */
template <typename KeyFn>
InfoSetPartition partition_by_key(const GameTree& g, KeyFn key) {
  InfoSetPartition part;
  part.node_infoset.assign(g.num_nodes(), kNoInfoSet);
  part.by_player.assign(g.num_players(), {});
  std::map<std::pair<PlayerId, decltype(key(NodeId{}))>, std::uint32_t> ids;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] != NodeKind::Decision) continue;
    const PlayerId p = g.actor[h];
    auto [it, inserted] = ids.try_emplace({p, key(h)}, static_cast<std::uint32_t>(part.infosets.size()));
    if (inserted) {
      InfoSet is{p, {}, {}};
      for (std::size_t a = 0; a < g.num_actions[h]; ++a) is.labels.push_back(g.label[g.edge(h, a)]);
      part.infosets.push_back(std::move(is));
      part.by_player[p].push_back(it->second);
    }
    auto& is = part.infosets[it->second];
    if (is.labels.size() != g.num_actions[h])
      throw ValidationError("infoset rule merges node " + std::to_string(h) + " with nodes of a different action count");
    for (std::size_t a = 0; a < g.num_actions[h]; ++a)
      if (is.labels[a] != g.label[g.edge(h, a)])
        throw ValidationError("infoset rule merges node " + std::to_string(h) + " with nodes exposing different actions");
    is.nodes.push_back(h);
    part.node_infoset[h] = it->second;
  }
  return part;
}

/**
 * Public states for `playerset`: decision and chance nodes grouped by their
 * sequences of public tokens (identical and non-hidden for every member),
 * then closed under the members' infosets.
 */
inline PublicStatePartition compute_public_states(const GameTree& g, const InfoSetPartition& infosets,
                                                  std::vector<PlayerId> playerset) {
  if (playerset.empty()) throw std::invalid_argument("public states need a non-empty player set");
  std::sort(playerset.begin(), playerset.end());
  const auto in = incoming_edges(g);
  std::vector<std::uint32_t> seq(g.num_nodes(), SequenceTrie::kEmpty);
  SequenceTrie trie;
  for (NodeId h = 1; h < g.num_nodes(); ++h)
    seq[h] = trie.extend(seq[g.parent[h]], detail::public_token(g, in[h], playerset));

  // union-find over nodes sharing a sequence or an infoset of a member
  std::vector<NodeId> uf(g.num_nodes());
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](NodeId x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  auto unite = [&](NodeId a, NodeId b) {
    a = find(a), b = find(b);
    if (a != b) uf[std::max(a, b)] = std::min(a, b);
  };
  std::unordered_map<std::uint32_t, NodeId> first_with_seq;
  auto included = [&](NodeId h) { return g.kind[h] != NodeKind::Terminal; };
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (!included(h)) continue;
    auto [it, inserted] = first_with_seq.try_emplace(seq[h], h);
    if (!inserted) unite(it->second, h);
  }
  for (const auto& is : infosets.infosets)
    if (std::binary_search(playerset.begin(), playerset.end(), is.player))
      for (NodeId h : is.nodes) unite(is.nodes.front(), h);

  PublicStatePartition out;
  out.playerset = playerset;
  out.node_state.assign(g.num_nodes(), kNoInfoSet);
  std::unordered_map<NodeId, std::uint32_t> ids;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (!included(h)) continue;
    auto [it, inserted] = ids.try_emplace(find(h), static_cast<std::uint32_t>(out.states.size()));
    if (inserted) out.states.emplace_back();
    out.states[it->second].push_back(h);
    out.node_state[h] = it->second;
  }
  return out;
}

/** Validator output: empty `problems` means the check passed. */
struct Diagnostics {
  std::vector<std::string> problems;
  std::vector<std::pair<NodeId, NodeId>> offending_pairs;
  bool ok() const { return problems.empty(); }
  std::string summary(std::size_t max_lines = 5) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < problems.size() && i < max_lines; ++i) os << problems[i] << "\n";
    if (problems.size() > max_lines) os << "... " << problems.size() - max_lines << " more\n";
    return os.str();
  }
};

inline std::vector<PlayerId> strategic_players(const GameTree& g) {
  std::vector<PlayerId> ps;
  for (std::size_t p = 1; p < g.num_players(); ++p) ps.push_back(static_cast<PlayerId>(p));
  return ps;
}

/**
 * Public-turn-taking: within every public state over all players, all nodes
 * have the same acting player and the same root-path length.
 */
inline Diagnostics validate_public_turn_taking(const GameTree& g) {
  Diagnostics d;
  if (g.num_nodes() <= 1 || g.num_players() <= 1) return d;
  const auto infosets = compute_infosets(g);
  const auto ps = compute_public_states(g, infosets, strategic_players(g));
  for (const auto& state : ps.states) {
    const NodeId ref = state.front();
    for (NodeId h : state) {
      if (g.actor[h] == g.actor[ref] && g.depth[h] == g.depth[ref]) continue;
      d.offending_pairs.emplace_back(ref, h);
      d.problems.push_back("nodes " + std::to_string(ref) + " and " + std::to_string(h) +
                           " share a public state but differ in actor or depth");
    }
  }
  return d;
}

/**
 * Perfect recall for `player` under `part`: every node of an infoset has the
 * same sequence of (earlier own infoset, own action) pairs.
 */
inline Diagnostics validate_perfect_recall(const GameTree& g, const InfoSetPartition& part, PlayerId player) {
  Diagnostics d;
  const auto in = incoming_edges(g);
  std::vector<std::uint32_t> hist(g.num_nodes(), SequenceTrie::kEmpty);
  SequenceTrie trie;
  for (NodeId h = 1; h < g.num_nodes(); ++h) {
    const NodeId par = g.parent[h];
    hist[h] = hist[par];
    if (g.kind[par] == NodeKind::Decision && g.actor[par] == player) {
      const auto a = static_cast<std::uint32_t>(in[h] - g.edge_begin[par]);
      hist[h] = trie.extend(trie.extend(hist[par], part.of(par)), a);
    }
  }
  for (std::uint32_t id : part.by_player[player]) {
    const auto& nodes = part.infosets[id].nodes;
    for (NodeId h : nodes) {
      if (hist[h] == hist[nodes.front()]) continue;
      d.offending_pairs.emplace_back(nodes.front(), h);
      d.problems.push_back("infoset " + std::to_string(id) + " of player " + std::to_string(player) +
                           ": nodes " + std::to_string(nodes.front()) + " and " + std::to_string(h) +
                           " have different own histories");
      break;
    }
  }
  return d;
}

}  // namespace teamgame

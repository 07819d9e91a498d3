#pragma once

// Textual game format "teamgame/1".
//
//   teamgame/1
//   players <P>
//   <role> <name>                      (P lines, player 0 is chance)
//   omega <k> <state>...
//   nodes <N>
//   <id> T <payoff for players 1..P-1>
//   <id> C <k> { <label> <child> <prob> <token for players 1..P-1> }*k
//   <id> D <player> <k> { <label> <child> <token for players 1..P-1> }*k
//   private <0|1>
//   <id> <state for players 0..P-1> <pool for players 0..P-1>   (N lines if 1)
//   end
//
// Tokens: "-" hidden, "=" identical to the label, otherwise "~" + token text.

#include "teamgame/game_tree.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace teamgame {

inline constexpr const char* kFormatVersion = "teamgame/1";

inline void write_game(std::ostream& os, const GameTree& g) {
  const std::size_t np = g.num_players();
  os << kFormatVersion << "\n";
  os << "players " << np << "\n";
  for (const auto& p : g.players) os << role_name(p.role) << " " << p.name << "\n";
  os << "omega " << g.omega.size();
  for (const auto& s : g.omega) os << " " << s;
  os << "\nnodes " << g.num_nodes() << "\n";
  std::string line;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    os << h;
    switch (g.kind[h]) {
      case NodeKind::Terminal:
        os << " T";
        for (std::size_t p = 1; p < np; ++p) os << " " << to_string(g.payoff(h)[p]);
        break;
      case NodeKind::Chance: os << " C " << g.num_actions[h]; break;
      case NodeKind::Decision: os << " D " << int(g.actor[h]) << " " << g.num_actions[h]; break;
    }
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) {
      const auto e = g.edge(h, a);
      os << " " << g.symbols[g.label[e]] << " " << g.child[e];
      if (g.kind[h] == NodeKind::Chance) os << " " << to_string(g.chance_prob_exact(e));
      for (std::size_t p = 1; p < np; ++p) {
        const auto t = g.token(e, static_cast<PlayerId>(p));
        if (t == kHidden) os << " -";
        else if (t == g.label[e]) os << " =";
        else os << " ~" << g.symbols[t];
      }
    }
    os << "\n";
  }
  os << "private " << (g.has_private_info() ? 1 : 0) << "\n";
  if (g.has_private_info()) {
    for (NodeId h = 0; h < g.num_nodes(); ++h) {
      os << h;
      for (std::size_t p = 0; p < np; ++p) os << " " << int(g.private_state[h * np + p]);
      for (std::size_t p = 0; p < np; ++p) os << " " << g.private_pool[h * np + p];
      os << "\n";
    }
  }
  os << "end\n";
}

namespace detail {

class Tokenizer {
 public:
  explicit Tokenizer(std::istream& is) : is_(is) {}
  std::string next(const char* what) {
    std::string s;
    if (!(is_ >> s)) throw ValidationError(std::string("unexpected end of game file while reading ") + what);
    return s;
  }
  void expect(const std::string& word) {
    const auto s = next(word.c_str());
    if (s != word) throw ValidationError("expected '" + word + "' but found '" + s + "'");
  }
  std::uint64_t number(const char* what) {
    const auto s = next(what);
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError(std::string("expected a number for ") + what + ", found '" + s + "'");
    }
  }

 private:
  std::istream& is_;
};

}  // namespace detail

inline GameTree read_game(std::istream& is) {
  detail::Tokenizer tk(is);
  const auto version = tk.next("version");
  if (version != kFormatVersion) throw ValidationError("unsupported game format version '" + version + "'");
  GameTree g;
  tk.expect("players");
  const auto np = tk.number("player count");
  if (np < 1 || np > 32) throw ValidationError("player count out of range");
  for (std::size_t p = 0; p < np; ++p) {
    Player pl;
    pl.role = parse_role(tk.next("role"));
    pl.name = tk.next("player name");
    g.players.push_back(pl);
  }
  if (g.players[0].role != Role::Chance) throw ValidationError("player 0 must be chance");
  tk.expect("omega");
  const auto k = tk.number("omega size");
  for (std::size_t i = 0; i < k; ++i) g.omega.push_back(tk.next("omega state"));
  tk.expect("nodes");
  const auto n = tk.number("node count");
  TreeBuilder b(g);
  std::vector<std::uint64_t> pending_child;  // child id per edge as written
  std::vector<std::uint32_t> tokens(np);
  for (std::uint64_t h = 0; h < n; ++h) {
    if (tk.number("node id") != h) throw ValidationError("node ids must be dense and in order at node " + std::to_string(h));
    const auto kind = tk.next("node kind");
    if (kind == "T") {
      std::vector<Rational> pay(np, Rational(0));
      for (std::size_t p = 1; p < np; ++p) pay[p] = parse_rational(tk.next("payoff"));
      const NodeId z = b.add_node(NodeKind::Terminal, kChance, 0, TreeBuilder::kNoEdge);
      g.payoff_index[z] = b.intern_payoff(pay);
      continue;
    }
    NodeKind nk;
    PlayerId actor = kChance;
    if (kind == "C") nk = NodeKind::Chance;
    else if (kind == "D") {
      nk = NodeKind::Decision;
      const auto p = tk.number("actor");
      if (p == 0 || p >= np) throw ValidationError("decision node " + std::to_string(h) + " has invalid actor");
      actor = static_cast<PlayerId>(p);
    } else
      throw ValidationError("unknown node kind '" + kind + "' at node " + std::to_string(h));
    const auto na = tk.number("action count");
    if (na > 0xffff) throw ValidationError("too many actions at node " + std::to_string(h));
    const NodeId id = b.add_node(nk, actor, na, TreeBuilder::kNoEdge);
    for (std::size_t a = 0; a < na; ++a) {
      const auto lab = b.symbol(tk.next("action label"));
      const auto c = tk.number("child id");
      Rational prob;
      if (nk == NodeKind::Chance) prob = parse_rational(tk.next("chance probability"));
      tokens[0] = kHidden;
      for (std::size_t p = 1; p < np; ++p) {
        const auto t = tk.next("visibility token");
        if (t == "-") tokens[p] = kHidden;
        else if (t == "=") tokens[p] = lab;
        else if (t.size() > 1 && t[0] == '~') tokens[p] = b.symbol(t.substr(1));
        else
          throw ValidationError("malformed visibility token '" + t + "' at node " + std::to_string(h) + " action " +
                                g.symbols[lab]);
      }
      const auto e = b.edge(id, a);
      b.set_edge(e, lab, b.observation(tokens), nk == NodeKind::Chance ? &prob : nullptr);
      if (pending_child.size() <= e) pending_child.resize(e + 1);
      pending_child[e] = c;
    }
  }
  // link children and derive parents / depths
  for (std::uint64_t e = 0; e < g.child.size(); ++e) {
    const auto c = pending_child[e];
    if (c >= n) throw ValidationError("child id out of range on edge " + std::to_string(e));
    g.child[e] = static_cast<NodeId>(c);
  }
  for (NodeId h = 0; h < n; ++h)
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) {
      const NodeId c = g.child_of(h, a);
      if (c <= h || g.parent[c] != kNoNode) throw ValidationError("node " + std::to_string(c) + " is not a tree child");
      g.parent[c] = h;
      g.depth[c] = static_cast<std::uint16_t>(g.depth[h] + 1);
    }
  for (NodeId h = 1; h < n; ++h)
    if (g.parent[h] == kNoNode) throw ValidationError("node " + std::to_string(h) + " has no parent");
  tk.expect("private");
  if (tk.number("private flag") == 1) {
    g.private_state.assign(n * np, kNoState);
    g.private_pool.assign(n * np, 0);
    for (NodeId h = 0; h < n; ++h) {
      if (tk.number("node id") != h) throw ValidationError("private table out of order");
      for (std::size_t p = 0; p < np; ++p) g.private_state[h * np + p] = static_cast<std::uint8_t>(tk.number("state"));
      for (std::size_t p = 0; p < np; ++p) g.private_pool[h * np + p] = static_cast<std::uint16_t>(tk.number("pool"));
    }
  }
  tk.expect("end");
  g.validate();
  return g;
}

inline void save_game(const std::string& path, const GameTree& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_game(os, g);
  if (!os) throw std::runtime_error("error writing '" + path + "'");
}

inline GameTree load_game(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_game(is);
}

}  // namespace teamgame

#pragma once

// Hand-built micro-games (team of two against one opponent, at most 40
// nodes, at most three private states) used as oracle calibration corpus.
//
// Players: 0 chance, 1 opponent "O", 2 and 3 team members "T1", "T2".
// Team payoff t is split evenly between the members; the opponent gets -t.

#include "teamgame/game_tree.hpp"

#include <functional>
#include <string>
#include <vector>

namespace teamgame {

class MicroBuilder {
 public:
  using Next = std::function<void(std::uint64_t)>;
  struct Branch {
    std::string label;
    std::string visible;  // one char per strategic player: 'y' observes the label, 'n' does not
    Next next;
    Rational prob = 0;                   // chance branches only
    std::vector<std::string> tokens{};   // optional per-player token overriding `visible` ("" keeps it)
  };

  /** `dynamic`: private states are tracked by pools only (no fixed dealt state). */
  MicroBuilder(std::vector<std::string> omega, bool dynamic) : dynamic_(dynamic), b_(init(std::move(omega)), true) {}

  /** Current private state / pool of a team member while building (applied to new nodes). */
  void set_state(PlayerId p, std::uint8_t s) { state_[p] = s; }
  void set_pool(PlayerId p, std::uint16_t mask) { pool_[p] = mask; }
  std::uint8_t state(PlayerId p) const { return state_[p]; }
  std::uint16_t pool(PlayerId p) const { return pool_[p]; }

  void chance(std::uint64_t in, std::vector<Branch> br) { node(in, NodeKind::Chance, kChance, std::move(br)); }
  void decide(std::uint64_t in, PlayerId who, std::vector<Branch> br) { node(in, NodeKind::Decision, who, std::move(br)); }

  void leaf(std::uint64_t in, const Rational& team_payoff) {
    const NodeId z = b_.add_terminal({Rational(0), -team_payoff, team_payoff / 2, team_payoff / 2}, in);
    stamp(z);
  }

  static constexpr std::uint64_t root() { return TreeBuilder::kNoEdge; }

  GameTree finish() {
    g_.validate();
    return std::move(g_);
  }

 private:
  GameTree& init(std::vector<std::string> omega) {
    g_.players = {{"chance", Role::Chance}, {"O", Role::Opponent}, {"T1", Role::Team}, {"T2", Role::Team}};
    g_.omega = std::move(omega);
    return g_;
  }

  void stamp(NodeId h) {
    for (PlayerId p = 1; p < 4; ++p)
      b_.set_private(h, p, dynamic_ ? kNoState : state_[p], pool_[p]);
  }

  void node(std::uint64_t in, NodeKind kind, PlayerId who, std::vector<Branch> br) {
    const NodeId h = b_.add_node(kind, who, br.size(), in);
    stamp(h);
    for (std::size_t a = 0; a < br.size(); ++a) {
      const auto lab = b_.symbol(br[a].label);
      std::vector<std::uint32_t> tokens(4, kHidden);
      if (br[a].visible.size() != 3) throw std::invalid_argument("visibility needs one char per strategic player");
      for (std::size_t p = 1; p < 4; ++p) {
        tokens[p] = br[a].visible[p - 1] == 'y' ? lab : kHidden;
        if (br[a].tokens.size() >= p && !br[a].tokens[p - 1].empty()) tokens[p] = b_.symbol(br[a].tokens[p - 1]);
      }
      b_.set_edge(b_.edge(h, a), lab, b_.observation(tokens), kind == NodeKind::Chance ? &br[a].prob : nullptr);
    }
    for (std::size_t a = 0; a < br.size(); ++a) br[a].next(b_.edge(h, a));
  }

  GameTree g_;
  bool dynamic_;
  TreeBuilder b_;
  std::uint8_t state_[4] = {kNoState, kNoState, kNoState, kNoState};
  std::uint16_t pool_[4] = {0, 0, 0, 0};
};

namespace micro {

inline constexpr PlayerId kO = 1, kT1 = 2, kT2 = 3;

/** Deals T1 a private bit A/B; T2 always holds the third state Z (fixed, known). */
inline void deal_t1_bit(MicroBuilder& m, const std::function<void(std::uint64_t, int)>& rest) {
  m.set_state(kT2, 2);
  m.set_pool(kT2, 0b100);
  std::vector<MicroBuilder::Branch> br;
  for (int s = 0; s < 2; ++s)
    br.push_back({s ? "dB" : "dA", "nyn",
                  [&m, &rest, s](std::uint64_t e) {
                    m.set_state(kT1, static_cast<std::uint8_t>(s));
                    m.set_pool(kT1, static_cast<std::uint16_t>(1u << s));
                    rest(e, s);
                  },
                  Rational(1, 2)});
  m.chance(MicroBuilder::root(), std::move(br));
}

/**
 * Correlation beats independence: the opponent secretly names A or B, then
 * both members secretly pick A or B; the team scores 1 when they agree on
 * the side the opponent did not name.
 */
inline GameTree coordination() {
  MicroBuilder m({"A", "B", "Z"}, false);
  deal_t1_bit(m, [&](std::uint64_t e, int) {
    std::vector<MicroBuilder::Branch> ob;
    for (int g = 0; g < 2; ++g)
      ob.push_back({g ? "gB" : "gA", "ynn", [&m, g](std::uint64_t e1) {
                      std::vector<MicroBuilder::Branch> b1;
                      for (int a = 0; a < 2; ++a)
                        b1.push_back({a ? "B" : "A", "nyn", [&m, g, a](std::uint64_t e2) {
                                        std::vector<MicroBuilder::Branch> b2;
                                        for (int c = 0; c < 2; ++c)
                                          b2.push_back({c ? "B" : "A", "nny", [&m, g, a, c](std::uint64_t e3) {
                                                          m.leaf(e3, Rational(a == c && c != g ? 1 : 0));
                                                        }});
                                        m.decide(e2, kT2, std::move(b2));
                                      }});
                      m.decide(e1, kT1, std::move(b1));
                    }});
    m.decide(e, kO, std::move(ob));
  });
  return m.finish();
}

/**
 * Opponent acts first and the values separate: the coordination payoff of
 * `coordination` plus a bonus when T2 matches T1's private bit, which only
 * T1 observes.
 */
inline GameTree separation() {
  MicroBuilder m({"A", "B", "Z"}, false);
  deal_t1_bit(m, [&](std::uint64_t e, int s) {
    std::vector<MicroBuilder::Branch> ob;
    for (int g = 0; g < 2; ++g)
      ob.push_back({g ? "gB" : "gA", "ynn", [&m, g, s](std::uint64_t e1) {
                      std::vector<MicroBuilder::Branch> b1;
                      for (int a = 0; a < 2; ++a)
                        b1.push_back({a ? "B" : "A", "nyn", [&m, g, a, s](std::uint64_t e2) {
                                        std::vector<MicroBuilder::Branch> b2;
                                        for (int c = 0; c < 2; ++c)
                                          b2.push_back({c ? "B" : "A", "nny", [&m, g, a, c, s](std::uint64_t e3) {
                                                          const int t = (a == c && c != g ? 1 : 0) + (c == s ? 1 : 0);
                                                          m.leaf(e3, Rational(t));
                                                        }});
                                        m.decide(e2, kT2, std::move(b2));
                                      }});
                      m.decide(e1, kT1, std::move(b1));
                    }});
    m.decide(e, kO, std::move(ob));
  });
  return m.finish();
}

/**
 * Pure signalling, opponent last: T1 sends a public message about its bit,
 * T2 secretly guesses the bit, and the opponent (seeing only the message)
 * tries to name T2's guess.  The team scores 1 when T2 is right and the
 * opponent is wrong.
 */
inline GameTree signalling() {
  MicroBuilder m({"A", "B", "Z"}, false);
  deal_t1_bit(m, [&](std::uint64_t e, int s) {
    std::vector<MicroBuilder::Branch> b1;
    for (int msg = 0; msg < 2; ++msg)
      b1.push_back({msg ? "m1" : "m0", "yyy", [&m, s](std::uint64_t e1) {
                      std::vector<MicroBuilder::Branch> b2;
                      for (int c = 0; c < 2; ++c)
                        b2.push_back({c ? "B" : "A", "nny", [&m, s, c](std::uint64_t e2) {
                                        std::vector<MicroBuilder::Branch> ob;
                                        for (int g = 0; g < 2; ++g)
                                          ob.push_back({g ? "gB" : "gA", "ynn", [&m, s, c, g](std::uint64_t e3) {
                                                          m.leaf(e3, Rational(c == s && g != c ? 1 : 0));
                                                        }});
                                        m.decide(e2, kO, std::move(ob));
                                      }});
                      m.decide(e1, kT2, std::move(b2));
                    }});
    m.decide(e, kT1, std::move(b1));
  });
  return m.finish();
}

/**
 * Opponent last with public team actions: T1 may publicly bet (worth +1 with
 * bit A, -1 with bit B), T2 publicly echoes or not (worth 1/2 when echoing a
 * bet), and the opponent, seeing both actions, guesses T1's bit; a wrong
 * guess is worth 1 to the team.
 */
inline GameTree opponent_last() {
  MicroBuilder m({"A", "B", "Z"}, false);
  deal_t1_bit(m, [&](std::uint64_t e, int s) {
    std::vector<MicroBuilder::Branch> b1;
    for (int bet = 0; bet < 2; ++bet)
      b1.push_back({bet ? "bet" : "chk", "yyy", [&m, s, bet](std::uint64_t e1) {
                      std::vector<MicroBuilder::Branch> b2;
                      for (int echo = 0; echo < 2; ++echo)
                        b2.push_back({echo ? "echo" : "quiet", "yyy", [&m, s, bet, echo](std::uint64_t e2) {
                                        std::vector<MicroBuilder::Branch> ob;
                                        for (int g = 0; g < 2; ++g)
                                          ob.push_back({g ? "gB" : "gA", "yyy", [&m, s, bet, echo, g](std::uint64_t e3) {
                                                          Rational t = g != s ? 1 : 0;
                                                          if (bet) t += s == 0 ? 1 : -1;
                                                          if (bet && echo) t += Rational(1, 2);
                                                          m.leaf(e3, t);
                                                        }});
                                        m.decide(e2, kO, std::move(ob));
                                      }});
                      m.decide(e1, kT2, std::move(b2));
                    }});
    m.decide(e, kT1, std::move(b1));
  });
  return m.finish();
}

/**
 * Dynamic private information: T1 holds a bit and may publicly pass it to T2
 * (cost 1/8), after which T2 privately knows it; T2 secretly guesses the bit
 * and the opponent, seeing whether a pass happened, tries to name T2's guess.
 * Private states are tracked as pools of consistent values.
 */
inline GameTree dynamic_info() {
  MicroBuilder m({"A", "B"}, true);
  m.set_pool(kT1, 0b11);
  m.set_pool(kT2, 0b11);
  std::vector<MicroBuilder::Branch> deal;
  for (int s = 0; s < 2; ++s)
    deal.push_back({s ? "dB" : "dA", "nyn",
                    [&m, s](std::uint64_t e) {
                      std::vector<MicroBuilder::Branch> b1;
                      for (int pass = 0; pass < 2; ++pass) {
                        std::vector<std::string> tok;
                        if (pass) tok = {"", "", s ? "pass:B" : "pass:A"};  // T2 learns the bit
                        b1.push_back({pass ? "pass" : "keep", "yyy", [&m, s, pass](std::uint64_t e1) {
                                        std::vector<MicroBuilder::Branch> b2;
                                        for (int c = 0; c < 2; ++c)
                                          b2.push_back({c ? "B" : "A", "nny", [&m, s, pass, c](std::uint64_t e2) {
                                                          std::vector<MicroBuilder::Branch> ob;
                                                          for (int g = 0; g < 2; ++g)
                                                            ob.push_back({g ? "gB" : "gA", "ynn",
                                                                          [&m, s, pass, c, g](std::uint64_t e3) {
                                                                            Rational t = c == s && g != c ? 1 : 0;
                                                                            if (pass) t -= Rational(1, 8);
                                                                            m.leaf(e3, t);
                                                                          }});
                                                          m.decide(e2, kO, std::move(ob));
                                                        }});
                                        m.decide(e1, kT2, std::move(b2));
                                      }, 0, tok});
                      }
                      m.decide(e, kT1, std::move(b1));
                    },
                    Rational(1, 2)});
  m.chance(MicroBuilder::root(), std::move(deal));
  return m.finish();
}

struct MicroGame {
  std::string name;
  std::function<GameTree()> build;
};

inline std::vector<MicroGame> corpus() {
  return {{"coordination", coordination},
          {"separation", separation},
          {"signalling", signalling},
          {"opponent_last", opponent_last},
          {"dynamic_info", dynamic_info}};
}

}  // namespace micro
}  // namespace teamgame

#pragma once

// Parametric generators for Kuhn poker (mnKr), Leduc poker (mnLrc) and
// three-card Goofspiel (mnG) as adversarial team games.
//
// Seat order: opponents first, then team members.  Deal actions are seen by
// each player only through their own card; betting actions are public.

#include "teamgame/game_tree.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace teamgame {

enum class Family { Kuhn, Leduc, Goofspiel };

struct GameSpec {
  Family family = Family::Kuhn;
  int opponents = 1;
  int team = 2;
  int ranks = 3;
  int suits = 3;    // Leduc only
  int bet_cap = 1;  // Leduc: bets (including raises) allowed per round

  int players() const { return opponents + team; }

  std::string name() const {
    std::string s = std::to_string(opponents) + std::to_string(team);
    switch (family) {
      case Family::Kuhn: return s + "K" + std::to_string(ranks);
      case Family::Leduc: return s + "L" + std::to_string(ranks) + std::to_string(suits);
      case Family::Goofspiel: return s + "G";
    }
    return s;
  }

  /** Parses instance names such as "12K3", "13L43" or "12G". */
  static GameSpec parse(const std::string& name) {
    GameSpec s;
    if (name.size() < 3 || !std::isdigit(static_cast<unsigned char>(name[0])) ||
        !std::isdigit(static_cast<unsigned char>(name[1])))
      throw std::invalid_argument("malformed instance name '" + name + "'");
    s.opponents = name[0] - '0';
    s.team = name[1] - '0';
    const char f = name[2];
    const std::string rest = name.substr(3);
    auto all_digits = [](const std::string& x) {
      return !x.empty() && std::all_of(x.begin(), x.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (f == 'K' && all_digits(rest)) {
      s.family = Family::Kuhn;
      s.ranks = std::stoi(rest);
    } else if (f == 'L' && all_digits(rest) && rest.size() >= 2) {
      s.family = Family::Leduc;
      s.ranks = std::stoi(rest.substr(0, rest.size() - 1));
      s.suits = rest.back() - '0';
    } else if (f == 'G' && rest.empty()) {
      s.family = Family::Goofspiel;
      s.ranks = 3;
    } else {
      throw std::invalid_argument("malformed instance name '" + name + "'");
    }
    return s;
  }

  void validate() const {
    if (opponents < 1 || team < 2) throw std::invalid_argument("need at least one opponent and two team members");
    if (players() > 8) throw std::invalid_argument("at most 8 players are supported");
    switch (family) {
      case Family::Kuhn:
        if (ranks < players()) throw std::invalid_argument("kuhn needs at least as many ranks as players");
        if (ranks > 13) throw std::invalid_argument("at most 13 ranks are supported");
        break;
      case Family::Leduc:
        if (ranks < 3 || ranks > 13) throw std::invalid_argument("leduc needs between 3 and 13 ranks");
        if (suits < 1 || suits > 9) throw std::invalid_argument("leduc needs between 1 and 9 suits");
        if (ranks * suits < players() + 1) throw std::invalid_argument("leduc deck too small for the players");
        if (bet_cap < 1) throw std::invalid_argument("bet cap must be at least 1");
        break;
      case Family::Goofspiel:
        if (opponents != 1 || (team != 2 && team != 3))
          throw std::invalid_argument("goofspiel supports one opponent and two or three team members");
        if (ranks != 3) throw std::invalid_argument("goofspiel uses exactly three cards");
        break;
    }
  }
};

namespace detail {

inline std::vector<std::string> rank_names(int r) {
  static const std::string all = "23456789TJQKA";
  std::vector<std::string> out;
  for (int i = 13 - r; i < 13; ++i) out.emplace_back(1, all[static_cast<std::size_t>(i)]);
  return out;
}

inline void setup_players(GameTree& g, const GameSpec& spec) {
  g.players.push_back({"chance", Role::Chance});
  for (int i = 0; i < spec.players(); ++i)
    g.players.push_back({"P" + std::to_string(i + 1), i < spec.opponents ? Role::Opponent : Role::Team});
}

/** Kuhn/Leduc tree construction by recursive emission in pre-order. */
class PokerGenerator {
 public:
  PokerGenerator(GameTree& g, const GameSpec& spec) : g_(g), spec_(spec), b_(g, true) {
    n_ = spec.players();
    leduc_ = spec.family == Family::Leduc;
    names_ = rank_names(spec.ranks);
    g_.omega = names_;
    s_check_ = b_.symbol("check");
    s_bet_ = b_.symbol("bet");
    s_fold_ = b_.symbol("fold");
    s_call_ = b_.symbol("call");
    s_raise_ = b_.symbol("raise");
  }

  void build() {
    enumerate_deals();
    const NodeId root = b_.add_node(NodeKind::Chance, kChance, deals_.size(), TreeBuilder::kNoEdge);
    record_private(root, nullptr);
    std::vector<std::uint32_t> tokens(g_.num_players(), kHidden);
    for (std::size_t d = 0; d < deals_.size(); ++d) {
      std::string label = "d:";
      for (int p = 0; p < n_; ++p) label += names_[static_cast<std::size_t>(deals_[d][static_cast<std::size_t>(p)])];
      if (leduc_) label += "/" + names_[static_cast<std::size_t>(deals_[d].back())];
      for (int p = 0; p < n_; ++p)
        tokens[static_cast<std::size_t>(p + 1)] = b_.symbol("c:" + names_[static_cast<std::size_t>(deals_[d][static_cast<std::size_t>(p)])]);
      b_.set_edge(b_.edge(root, d), b_.symbol(label), b_.observation(tokens), &deal_probs_[d]);
    }
    for (std::size_t d = 0; d < deals_.size(); ++d) {
      deal_ = &deals_[d];
      std::vector<int> active(static_cast<std::size_t>(n_));
      std::iota(active.begin(), active.end(), 0);
      std::vector<int> contrib(static_cast<std::size_t>(n_), 1);  // ante
      open_round(0, active, contrib, 0, b_.edge(root, d));
    }
  }

 private:
  // Deals: Kuhn -> ordered distinct cards per seat; Leduc -> rank per seat plus
  // the community rank, each rank used at most `suits` times.
  void enumerate_deals() {
    const int len = leduc_ ? n_ + 1 : n_;
    std::vector<int> cur;
    std::vector<int> used(static_cast<std::size_t>(spec_.ranks), 0);
    const int copies = leduc_ ? spec_.suits : 1;
    const int deck = spec_.ranks * copies;
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(cur.size()) == len) {
        deals_.push_back(cur);
        // probability of drawing this rank sequence from the physical deck
        Rational p = 1;
        std::vector<int> u(static_cast<std::size_t>(spec_.ranks), 0);
        for (int i = 0; i < len; ++i) {
          const int r = cur[static_cast<std::size_t>(i)];
          p *= Rational(copies - u[static_cast<std::size_t>(r)], deck - i);
          ++u[static_cast<std::size_t>(r)];
        }
        deal_probs_.push_back(p);
        return;
      }
      for (int r = 0; r < spec_.ranks; ++r) {
        if (used[static_cast<std::size_t>(r)] >= copies) continue;
        ++used[static_cast<std::size_t>(r)];
        cur.push_back(r);
        self(self);
        cur.pop_back();
        --used[static_cast<std::size_t>(r)];
      }
    };
    rec(rec);
  }

  int bet_size(int rnd) const { return leduc_ ? (rnd == 0 ? 2 : 4) : 1; }
  int rounds() const { return leduc_ ? 2 : 1; }

  void record_private(NodeId h, const std::vector<int>* deal) {
    const auto full = static_cast<std::uint16_t>((1u << spec_.ranks) - 1);
    for (int p = 0; p < n_; ++p)
      b_.set_private(h, static_cast<PlayerId>(p + 1),
                     deal ? static_cast<std::uint8_t>((*deal)[static_cast<std::size_t>(p)]) : kNoState, full);
  }

  std::uint32_t obs_public(std::uint32_t sym, bool reveal) {
    std::uint32_t tok = sym;
    if (reveal) tok = b_.symbol(g_.symbols[sym] + "@" + names_[static_cast<std::size_t>(deal_->back())]);
    return b_.observation(public_tokens(g_, tok));
  }

  NodeId decision(int seat, std::size_t k, std::uint64_t in_edge) {
    const NodeId h = b_.add_node(NodeKind::Decision, static_cast<PlayerId>(seat + 1), k, in_edge);
    record_private(h, deal_);
    return h;
  }

  // True when the action closing the round leads into another betting round.
  bool continues(int rnd, std::size_t active_after) const { return active_after >= 2 && rnd + 1 < rounds(); }

  // Opening phase: seats in `active` order check or bet, starting at index k.
  void open_round(int rnd, const std::vector<int>& active, const std::vector<int>& contrib, std::size_t k,
                  std::uint64_t in_edge) {
    if (k == active.size()) {
      end_round(rnd, active, contrib, in_edge);
      return;
    }
    const int seat = active[k];
    const NodeId h = decision(seat, 2, in_edge);
    const bool last = k + 1 == active.size();
    b_.set_edge(b_.edge(h, 0), s_check_, obs_public(s_check_, last && continues(rnd, active.size())));
    b_.set_edge(b_.edge(h, 1), s_bet_, obs_public(s_bet_, false));
    open_round(rnd, active, contrib, k + 1, b_.edge(h, 0));
    std::vector<int> c2 = contrib;
    c2[static_cast<std::size_t>(seat)] += bet_size(rnd);
    respond(rnd, active, c2, seat, 1, responders_after(active, seat), 0, b_.edge(h, 1));
  }

  static std::vector<int> responders_after(const std::vector<int>& active, int seat) {
    std::vector<int> out;
    const auto pos = static_cast<std::size_t>(std::find(active.begin(), active.end(), seat) - active.begin());
    for (std::size_t j = 1; j < active.size(); ++j) out.push_back(active[(pos + j) % active.size()]);
    return out;
  }

  // Facing a bet: each pending seat folds, calls or (below the cap) raises.
  void respond(int rnd, const std::vector<int>& active, const std::vector<int>& contrib, int aggressor, int bets,
               const std::vector<int>& pending, std::size_t idx, std::uint64_t in_edge) {
    if (idx == pending.size()) {
      end_round(rnd, active, contrib, in_edge);
      return;
    }
    const int seat = pending[idx];
    const bool can_raise = leduc_ && bets < spec_.bet_cap;
    const NodeId h = decision(seat, can_raise ? 3 : 2, in_edge);
    const bool last = idx + 1 == pending.size();
    const int level = contrib[static_cast<std::size_t>(aggressor)];

    // fold
    std::vector<int> after_fold;
    for (int s : active)
      if (s != seat) after_fold.push_back(s);
    b_.set_edge(b_.edge(h, 0), s_fold_, obs_public(s_fold_, last && continues(rnd, after_fold.size())));
    // call
    b_.set_edge(b_.edge(h, 1), s_call_, obs_public(s_call_, last && continues(rnd, active.size())));
    if (can_raise) b_.set_edge(b_.edge(h, 2), s_raise_, obs_public(s_raise_, false));

    respond(rnd, after_fold, contrib, aggressor, bets, pending, idx + 1, b_.edge(h, 0));
    std::vector<int> c_call = contrib;
    c_call[static_cast<std::size_t>(seat)] = level;
    respond(rnd, active, c_call, aggressor, bets, pending, idx + 1, b_.edge(h, 1));
    if (can_raise) {
      std::vector<int> c_raise = contrib;
      c_raise[static_cast<std::size_t>(seat)] = level + bet_size(rnd);
      respond(rnd, active, c_raise, seat, bets + 1, responders_after(active, seat), 0, b_.edge(h, 2));
    }
  }

  void end_round(int rnd, const std::vector<int>& active, const std::vector<int>& contrib, std::uint64_t in_edge) {
    if (active.size() >= 2 && rnd + 1 < rounds()) {
      open_round(rnd + 1, active, contrib, 0, in_edge);
      return;
    }
    const NodeId z = b_.add_terminal(payoff(active, contrib), in_edge);
    record_private(z, deal_);
  }

  int strength(int seat) const {
    const int card = (*deal_)[static_cast<std::size_t>(seat)];
    if (leduc_ && card == deal_->back()) return 100 + card;
    return card;
  }

  std::vector<Rational> payoff(const std::vector<int>& active, const std::vector<int>& contrib) const {
    std::vector<int> winners;
    int best = -1;
    for (int s : active) {
      const int v = strength(s);
      if (v > best) best = v, winners.clear();
      if (v == best) winners.push_back(s);
    }
    Rational pot = 0, opp_chips = 0;
    for (int p = 0; p < n_; ++p) {
      pot += contrib[static_cast<std::size_t>(p)];
      if (p < spec_.opponents) opp_chips += contrib[static_cast<std::size_t>(p)];
    }
    std::vector<Rational> won(static_cast<std::size_t>(n_), Rational(0));
    const bool team_only = std::all_of(winners.begin(), winners.end(), [&](int s) { return s >= spec_.opponents; });
    if (leduc_ && team_only) {
      // team win: team chips go back to their owners, opponent chips are shared evenly
      for (int p = spec_.opponents; p < n_; ++p)
        won[static_cast<std::size_t>(p)] = contrib[static_cast<std::size_t>(p)] + opp_chips / spec_.team;
    } else {
      for (int s : winners) won[static_cast<std::size_t>(s)] = pot / static_cast<int>(winners.size());
    }
    std::vector<Rational> out(static_cast<std::size_t>(n_ + 1), Rational(0));
    for (int p = 0; p < n_; ++p)
      out[static_cast<std::size_t>(p + 1)] = won[static_cast<std::size_t>(p)] - contrib[static_cast<std::size_t>(p)];
    return out;
  }

  GameTree& g_;
  const GameSpec& spec_;
  TreeBuilder b_;
  int n_ = 0;
  bool leduc_ = false;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> deals_;
  std::vector<Rational> deal_probs_;
  const std::vector<int>* deal_ = nullptr;
  std::uint32_t s_check_ = 0, s_bet_ = 0, s_fold_ = 0, s_call_ = 0, s_raise_ = 0;
};

/**
 * Goofspiel with three cards.  The prize order is drawn at the root and is
 * public; each round every player bids secretly from the remaining hand, and
 * the closing bid of the round announces who won that prize (not the bids).
 * The third round is forced and resolved at the terminal.
 */
class GoofspielGenerator {
 public:
  GoofspielGenerator(GameTree& g, const GameSpec& spec) : g_(g), spec_(spec), b_(g, true) {
    n_ = spec.players();
    g_.omega = {"1", "2", "3"};
  }

  void build() {
    std::vector<int> order = {1, 2, 3};
    std::vector<std::vector<int>> orders;
    do orders.push_back(order);
    while (std::next_permutation(order.begin(), order.end()));
    const NodeId root = b_.add_node(NodeKind::Chance, kChance, orders.size(), TreeBuilder::kNoEdge);
    record(root, std::vector<int>(static_cast<std::size_t>(n_), 7));
    const Rational p(1, static_cast<int>(orders.size()));
    for (std::size_t i = 0; i < orders.size(); ++i) {
      std::string label = "o:";
      for (int c : orders[i]) label += std::to_string(c);
      const auto sym = b_.symbol(label);
      b_.set_edge(b_.edge(root, i), sym, b_.observation(public_tokens(g_, sym)), &p);
    }
    for (std::size_t i = 0; i < orders.size(); ++i) {
      prizes_ = orders[i];
      std::vector<int> hands(static_cast<std::size_t>(n_), 7);  // bitmask of cards 1..3
      std::vector<std::vector<int>> bids(static_cast<std::size_t>(n_));
      bid(0, 0, hands, hands, bids, b_.edge(root, i));
    }
  }

 private:
  void record(NodeId h, const std::vector<int>& round_start_hands) {
    for (int p = 0; p < n_; ++p)
      b_.set_private(h, static_cast<PlayerId>(p + 1), kNoState,
                     static_cast<std::uint16_t>(round_start_hands[static_cast<std::size_t>(p)]));
  }

  // Winners (seat indices) of round `rnd` given the bids so far.
  std::vector<int> round_winners(const std::vector<std::vector<int>>& bids, int rnd) const {
    std::vector<int> w;
    int best = -1;
    for (int p = 0; p < n_; ++p) {
      const int v = bids[static_cast<std::size_t>(p)][static_cast<std::size_t>(rnd)];
      if (v > best) best = v, w.clear();
      if (v == best) w.push_back(p);
    }
    return w;
  }

  void bid(int rnd, int seat, const std::vector<int>& start_hands, const std::vector<int>& hands,
           std::vector<std::vector<int>>& bids, std::uint64_t in_edge) {
    if (rnd == 2) {
      terminal(hands, bids, in_edge);
      return;
    }
    const int hand = hands[static_cast<std::size_t>(seat)];
    std::vector<int> cards;
    for (int c = 1; c <= 3; ++c)
      if (hand & (1 << (c - 1))) cards.push_back(c);
    const NodeId h = b_.add_node(NodeKind::Decision, static_cast<PlayerId>(seat + 1), cards.size(), in_edge);
    record(h, start_hands);
    const bool closes = seat + 1 == n_;
    for (std::size_t a = 0; a < cards.size(); ++a) {
      const auto sym = b_.symbol("b" + std::to_string(cards[a]));
      std::vector<std::uint32_t> tokens(g_.num_players(), kHidden);
      if (closes) {
        bids[static_cast<std::size_t>(seat)].push_back(cards[a]);
        std::string ann = "w" + std::to_string(rnd + 1) + ":";
        for (int w : round_winners(bids, rnd)) ann += "P" + std::to_string(w + 1);
        bids[static_cast<std::size_t>(seat)].pop_back();
        for (int p = 0; p < n_; ++p) tokens[static_cast<std::size_t>(p + 1)] = b_.symbol(ann);
        tokens[static_cast<std::size_t>(seat + 1)] = b_.symbol(g_.symbols[sym] + "|" + ann);
      } else {
        tokens[static_cast<std::size_t>(seat + 1)] = sym;
      }
      b_.set_edge(b_.edge(h, a), sym, b_.observation(tokens));
    }
    for (std::size_t a = 0; a < cards.size(); ++a) {
      std::vector<int> next = hands;
      next[static_cast<std::size_t>(seat)] &= ~(1 << (cards[a] - 1));
      bids[static_cast<std::size_t>(seat)].push_back(cards[a]);
      if (closes) bid(rnd + 1, 0, next, next, bids, b_.edge(h, a));
      else bid(rnd, seat + 1, start_hands, next, bids, b_.edge(h, a));
      bids[static_cast<std::size_t>(seat)].pop_back();
    }
  }

  void terminal(const std::vector<int>& hands, std::vector<std::vector<int>>& bids, std::uint64_t in_edge) {
    for (int p = 0; p < n_; ++p) {
      int last = 0;
      for (int c = 1; c <= 3; ++c)
        if (hands[static_cast<std::size_t>(p)] & (1 << (c - 1))) last = c;
      bids[static_cast<std::size_t>(p)].push_back(last);
    }
    std::vector<Rational> score(static_cast<std::size_t>(n_), Rational(0));
    for (int rnd = 0; rnd < 3; ++rnd) {
      const auto w = round_winners(bids, rnd);
      for (int s : w)
        score[static_cast<std::size_t>(s)] += Rational(prizes_[static_cast<std::size_t>(rnd)], static_cast<int>(w.size()));
    }
    for (int p = 0; p < n_; ++p) bids[static_cast<std::size_t>(p)].pop_back();
    // team members share the mean team score; shift by the average score to make the game zero-sum
    Rational team_total = 0;
    for (int p = spec_.opponents; p < n_; ++p) team_total += score[static_cast<std::size_t>(p)];
    const Rational team_mean = team_total / spec_.team;
    const Rational shift = Rational(6, n_);
    std::vector<Rational> out(static_cast<std::size_t>(n_ + 1), Rational(0));
    for (int p = 0; p < n_; ++p)
      out[static_cast<std::size_t>(p + 1)] = (p < spec_.opponents ? score[static_cast<std::size_t>(p)] : team_mean) - shift;
    b_.add_terminal(out, in_edge);
    record(static_cast<NodeId>(g_.num_nodes() - 1), hands);
  }

  GameTree& g_;
  const GameSpec& spec_;
  TreeBuilder b_;
  int n_ = 0;
  std::vector<int> prizes_;
};

}  // namespace detail

inline GameTree gen_kuhn(const GameSpec& spec) {
  if (spec.family != Family::Kuhn) throw std::invalid_argument("gen_kuhn needs a kuhn spec");
  spec.validate();
  GameTree g;
  detail::setup_players(g, spec);
  detail::PokerGenerator(g, spec).build();
  g.validate();
  return g;
}

inline GameTree gen_leduc(const GameSpec& spec) {
  if (spec.family != Family::Leduc) throw std::invalid_argument("gen_leduc needs a leduc spec");
  spec.validate();
  GameTree g;
  detail::setup_players(g, spec);
  detail::PokerGenerator(g, spec).build();
  g.validate();
  return g;
}

inline GameTree gen_goofspiel(const GameSpec& spec) {
  if (spec.family != Family::Goofspiel) throw std::invalid_argument("gen_goofspiel needs a goofspiel spec");
  spec.validate();
  GameTree g;
  detail::setup_players(g, spec);
  detail::GoofspielGenerator(g, spec).build();
  g.validate();
  return g;
}

inline GameTree generate(const GameSpec& spec) {
  switch (spec.family) {
    case Family::Kuhn: return gen_kuhn(spec);
    case Family::Leduc: return gen_leduc(spec);
    case Family::Goofspiel: return gen_goofspiel(spec);
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace teamgame

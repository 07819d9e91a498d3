#include "doctest.h"

#include "teamgame/games.hpp"
#include "teamgame/infosets.hpp"

#include <map>

using namespace teamgame;

namespace {

std::uint64_t count_label(const GameTree& g, const std::string& label) {
  std::uint64_t n = 0;
  for (std::uint64_t e = 0; e < g.child.size(); ++e) n += g.symbols[g.label[e]] == label;
  return n;
}

}  // namespace

TEST_CASE("generator node counts") {
  const std::map<std::string, std::size_t> expected = {{"12K3", 151},   {"12K4", 601},   {"12K6", 3001},
                                                       {"13K6", 23401}, {"12L33", 13183}, {"12L43", 42589},
                                                       {"12G", 2509}};
  for (const auto& [name, nodes] : expected) {
    CAPTURE(name);
    CHECK(generate(GameSpec::parse(name)).num_nodes() == nodes);
  }
}

TEST_CASE("kuhn deal") {
  const auto g = generate(GameSpec::parse("12K3"));
  REQUIRE(g.kind[0] == NodeKind::Chance);
  CHECK(g.num_actions[0] == 6);
  for (std::size_t a = 0; a < 6; ++a) CHECK(g.chance_prob_exact(g.edge(0, a)) == Rational(1, 6));
  CHECK(g.players_with_role(Role::Opponent).size() == 1);
  CHECK(g.players_with_role(Role::Team).size() == 2);
  // each player observes only its own card at the deal
  for (std::size_t a = 0; a < 6; ++a)
    for (PlayerId p = 1; p < 4; ++p) CHECK(g.symbols[g.token(g.edge(0, a), p)].rfind("c:", 0) == 0);
}

TEST_CASE("leduc with a bet cap of one has no raises") {
  const auto g = generate(GameSpec::parse("12L33"));
  CHECK(count_label(g, "raise") == 0);
  CHECK(count_label(g, "bet") > 0);
  // after a bet only fold and call follow within the round
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] != NodeKind::Decision) continue;
    for (std::size_t a = 0; a < g.num_actions[h]; ++a) {
      if (g.label_of(h, a) != "bet") continue;
      const NodeId c = g.child_of(h, a);
      if (g.kind[c] != NodeKind::Decision) continue;
      CHECK(g.num_actions[c] == 2);
      CHECK(g.label_of(c, 0) == "fold");
      CHECK(g.label_of(c, 1) == "call");
    }
  }
}

TEST_CASE("goofspiel prize order") {
  const auto g = generate(GameSpec::parse("12G"));
  REQUIRE(g.kind[0] == NodeKind::Chance);
  CHECK(g.num_actions[0] == 6);
  std::map<char, Rational> first_prize;  // marginal of the first revealed prize
  for (std::size_t a = 0; a < 6; ++a) {
    const auto e = g.edge(0, a);
    CHECK(g.chance_prob_exact(e) == Rational(1, 6));
    const auto& label = g.label_of(0, a);
    REQUIRE(label.rfind("o:", 0) == 0);
    first_prize[label[2]] += g.chance_prob_exact(e);
    for (PlayerId p = 1; p < g.num_players(); ++p) CHECK(g.observable(e, p));  // prize order is public
  }
  REQUIRE(first_prize.size() == 3);
  for (const auto& [card, p] : first_prize) CHECK(p == Rational(1, 3));
}

TEST_CASE("payoffs are zero-sum") {
  for (const char* name : {"12K3", "12L33", "12G"}) {
    CAPTURE(name);
    const auto g = generate(GameSpec::parse(name));
    for (NodeId h = 0; h < g.num_nodes(); ++h) {
      if (g.kind[h] != NodeKind::Terminal) continue;
      Rational s = 0;
      for (const auto& x : g.payoff(h)) s += x;
      CHECK(s == 0);
    }
  }
}

TEST_CASE("instance names") {
  const auto k = GameSpec::parse("13K6");
  CHECK(k.family == Family::Kuhn);
  CHECK(k.opponents == 1);
  CHECK(k.team == 3);
  CHECK(k.ranks == 6);
  CHECK(k.name() == "13K6");
  const auto l = GameSpec::parse("12L43");
  CHECK(l.family == Family::Leduc);
  CHECK(l.ranks == 4);
  CHECK(l.suits == 3);
  CHECK(GameSpec::parse("12G").family == Family::Goofspiel);
  CHECK_THROWS_AS(GameSpec::parse("K3"), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec::parse("12X3"), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec::parse("12K2").validate(), std::invalid_argument);  // fewer ranks than players
  CHECK_THROWS_AS(GameSpec::parse("11K3").validate(), std::invalid_argument);  // team of one
}

#include "doctest.h"
#include "support.hpp"

#include "teamgame/games.hpp"
#include "teamgame/infosets.hpp"
#include "teamgame/plans.hpp"
#include "teamgame/serialize.hpp"
#include "teamgame/transform.hpp"

#include <set>
#include <sstream>

using namespace teamgame;
using namespace testutil;

namespace {

const Player kA{"A", Role::Opponent}, kB{"B", Role::Team};

/** First decision nodes of `player` (no earlier own decision on the path). */
std::vector<NodeId> first_decisions(const GameTree& g, PlayerId player) {
  std::vector<NodeId> out;
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] != NodeKind::Decision || g.actor[h] != player) continue;
    bool first = true;
    for (NodeId a = g.parent[h]; a != kNoNode; a = g.parent[a])
      if (g.kind[a] == NodeKind::Decision && g.actor[a] == player) first = false;
    if (first) out.push_back(h);
  }
  return out;
}

}  // namespace

TEST_CASE("fully observable game has singleton infosets") {
  const auto g = build({kA, kB}, chance({{"x", "yy", Rational(1, 2), decide(1, {{"l", "yy", 0, decide(2, {{"u", "yy", 0, leaf({0, 1, -1})}, {"d", "yy", 0, leaf({0, -1, 1})}})},
                                                                         {"r", "yy", 0, leaf({0, 0, 0})}})},
                                         {"y", "yy", Rational(1, 2), decide(1, {{"l", "yy", 0, leaf({0, 2, -2})}, {"r", "yy", 0, leaf({0, 0, 0})}})}}));
  const auto part = compute_infosets(g);
  for (const auto& I : part.infosets) CHECK(I.nodes.size() == 1);
  CHECK(part.size() == 3);
}

TEST_CASE("hidden deal merges the first mover's nodes") {
  auto mover = [] { return decide(1, {{"l", "nn", 0, leaf({0, 1, -1})}, {"r", "nn", 0, leaf({0, -1, 1})}}); };
  const auto g = build({kA, kB}, chance({{"x", "nn", Rational(1, 3), mover()}, {"y", "nn", Rational(1, 3), mover()},
                                         {"z", "nn", Rational(1, 3), mover()}}));
  const auto part = compute_infosets(g);
  REQUIRE(part.size() == 1);
  CHECK(part.infosets[0].nodes.size() == 3);
}

TEST_CASE("12K3 first team decisions group by own card") {
  const auto g = generate(GameSpec::parse("12K3"));
  const auto part = compute_infosets(g);
  const PlayerId member = g.players_with_role(Role::Team).front();
  std::map<std::uint32_t, std::size_t> after_check;  // infoset -> nodes, following the opponent's check
  for (NodeId h : first_decisions(g, member))
    if (g.label_of(g.parent[h], 0) == "check" && g.child_of(g.parent[h], 0) == h) after_check[part.of(h)] += 1;
  CHECK(after_check.size() == 3);  // one per own card
  for (const auto& [id, n] : after_check) {
    CHECK(n == 2);  // two possible teammate cards
    CHECK(part.infosets[id].nodes.size() == 2);
  }
}

TEST_CASE("public states") {
  const auto g = generate(GameSpec::parse("12K3"));
  const auto part = compute_infosets(g);
  const auto team = g.players_with_role(Role::Team);

  SUBCASE("singleton playerset coincides with the player's observation classes") {
    for (PlayerId p = 1; p < g.num_players(); ++p) {
      const auto ps = compute_public_states(g, part, {p});
      for (std::uint32_t id : part.by_player[p]) {
        std::set<std::uint32_t> states;
        for (NodeId h : part.infosets[id].nodes) states.insert(ps.node_state[h]);
        CHECK(states.size() == 1);
      }
    }
  }
  SUBCASE("team: member one's first-decision infosets after a check share one public state") {
    const auto ps = compute_public_states(g, part, team);
    std::set<std::uint32_t> states;
    for (NodeId h : first_decisions(g, team[0]))
      if (g.child_of(g.parent[h], 0) == h) states.insert(ps.node_state[h]);
    CHECK(states.size() == 1);
  }
  SUBCASE("member two's nodes split by member one's public action") {
    const auto ps = compute_public_states(g, part, team);
    std::map<std::string, std::set<std::uint32_t>> states;  // member-one action -> public states of member two
    for (NodeId h : first_decisions(g, team[0])) {
      if (g.child_of(g.parent[h], 0) != h) continue;  // opponent checked
      for (std::size_t a = 0; a < g.num_actions[h]; ++a) {
        const NodeId c = g.child_of(h, a);
        if (g.kind[c] == NodeKind::Decision && g.actor[c] == team[1]) states[g.label_of(h, a)].insert(ps.node_state[c]);
      }
    }
    REQUIRE(states.size() == 2);
    CHECK(states.begin()->second.size() == 1);
    CHECK(std::next(states.begin())->second.size() == 1);
    CHECK(*states.begin()->second.begin() != *std::next(states.begin())->second.begin());
  }
}

TEST_CASE("public turn-taking validation") {
  SUBCASE("generator outputs are valid") {
    for (const char* name : {"12K3", "12K4", "13K6", "12L33", "12G"}) {
      CAPTURE(name);
      CHECK(validate_public_turn_taking(generate(GameSpec::parse(name))).ok());
    }
  }
  SUBCASE("single terminal is valid") {
    CHECK(validate_public_turn_taking(build({kA, kB}, leaf({0, 0, 0}))).ok());
  }
  SUBCASE("actor order depending on a hidden deal is invalid") {
    auto act = [](PlayerId p) { return decide(p, {{"l", "yy", 0, leaf({0, 1, -1})}, {"r", "yy", 0, leaf({0, -1, 1})}}); };
    const auto g = build({kA, kB}, chance({{"x", "nn", Rational(1, 2), act(1)}, {"y", "nn", Rational(1, 2), act(2)}}));
    const auto d = validate_public_turn_taking(g);
    CHECK_FALSE(d.ok());
    CHECK(d.offending_pairs.size() == 1);
  }
}

TEST_CASE("perfect recall validation") {
  SUBCASE("generator outputs are valid for every player") {
    for (const char* name : {"12K3", "12K4", "12L33", "12G"}) {
      CAPTURE(name);
      const auto g = generate(GameSpec::parse(name));
      const auto part = compute_infosets(g);
      for (PlayerId p = 1; p < g.num_players(); ++p) CHECK(validate_perfect_recall(g, part, p).ok());
    }
  }
  SUBCASE("merging a node with its own successor is invalid") {
    const auto g = build({kA, kB}, decide(1, {{"l", "yy", 0, decide(1, {{"l", "yy", 0, leaf({0, 1, -1})}, {"r", "yy", 0, leaf({0, 0, 0})}})},
                                              {"r", "yy", 0, leaf({0, -1, 1})}}));
    const auto part = partition_by_key(g, [](NodeId) { return 0; });
    CHECK_FALSE(validate_perfect_recall(g, part, 1).ok());
  }
}

TEST_CASE("expected payoff") {
  SUBCASE("uniform profile on a symmetric coin game") {
    const auto g = build({kA, kB}, decide(1, {{"h", "yy", 0, leaf({0, 1, -1})}, {"t", "yy", 0, leaf({0, -1, 1})}}));
    const auto part = compute_infosets(g);
    ExactProfile prof;
    prof.probs = {{Rational(1, 2), Rational(1, 2)}};
    CHECK(expected_payoff(g, part, prof)[1] == 0);
  }
  SUBCASE("pure plans on 12K3 agree with path following") {
    const auto g = generate(GameSpec::parse("12K3"));
    const auto part = compute_infosets(g);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
      const auto a = random_full_plan(g, part, player_mask(g, {1}), rng);
      const auto b = random_full_plan(g, part, player_mask(g, {2, 3}), rng);
      CHECK(plan_payoff(g, part, {&a, &b}) == follow_plans(g, part, {&a, &b}));
    }
  }
  SUBCASE("transformed games are zero-sum under any profile") {
    const auto g = generate(GameSpec::parse("12K3"));
    std::mt19937_64 rng(5);
    for (auto method : {Method::Mpta, Method::Tpica}) {
      TransformConfig cfg;
      cfg.method = method;
      const auto t = transform(g, cfg);
      const auto prof = random_profile(t.partition, rng);
      const auto v = expected_payoff(t.game, t.partition, prof);
      CHECK(v[1] + v[2] == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("game files round-trip") {
  for (const char* name : {"12K3", "12L33", "12G"}) {
    CAPTURE(name);
    const auto g = generate(GameSpec::parse(name));
    std::ostringstream os;
    write_game(os, g);
    std::istringstream is(os.str());
    const auto h = read_game(is);
    std::ostringstream os2;
    write_game(os2, h);
    CHECK(os.str() == os2.str());
    CHECK(h.num_nodes() == g.num_nodes());
    CHECK(compute_infosets(h).size() == compute_infosets(g).size());
  }
  std::istringstream bad("not-a-game 1");
  CHECK_THROWS_AS(read_game(bad), ValidationError);
}

TEST_CASE("structural validation rejects broken chance distributions") {
  CHECK_THROWS_AS(build({kA, kB}, chance({{"x", "nn", Rational(1, 3), leaf({0, 0, 0})}, {"y", "nn", Rational(1, 3), leaf({0, 0, 0})}})),
                  ValidationError);
}

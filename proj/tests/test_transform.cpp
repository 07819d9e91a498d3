#include "doctest.h"
#include "support.hpp"

#include "teamgame/games.hpp"
#include "teamgame/micro.hpp"
#include "teamgame/transform.hpp"

#include <set>

using namespace teamgame;
using namespace testutil;

namespace {

std::uint64_t team_decision_nodes(const GameTree& g) {
  std::uint64_t n = 0;
  for (NodeId h = 0; h < g.num_nodes(); ++h) n += g.kind[h] == NodeKind::Decision && g.is_team(g.actor[h]);
  return n;
}

TransformResult run(const GameTree& g, Method m, InfosetRule r = InfosetRule::B) {
  TransformConfig cfg;
  cfg.method = m;
  cfg.rule = r;
  return transform(g, cfg);
}

}  // namespace

TEST_CASE("episode size formulas") {
  SUBCASE("known values") {
    for (int omega = 1; omega <= 6; ++omega) CHECK(mpta_episode_size(omega, 1, 2) == 3);
    CHECK(mpta_episode_size(3, 2, 2) == 30);
    CHECK(tpica_episode_size(3, 1, 2) == 16);
    CHECK(tpica_episode_size(3, 2, 2) == 144);
  }
  SUBCASE("closed forms agree with direct summation") {
    for (int omega = 1; omega <= 6; ++omega)
      for (int team = 1; team <= std::min(omega, 4); ++team)
        for (int actions = 1; actions <= 4; ++actions) {
          CAPTURE(omega);
          CAPTURE(team);
          CAPTURE(actions);
          CHECK(mpta_episode_size_closed(omega, team, actions) == mpta_episode_size(omega, team, actions));
          CHECK(tpica_episode_size_closed(omega, team, actions) == tpica_episode_size(omega, team, actions));
        }
  }
  SUBCASE("size ratio grows with the private-state alphabet") {
    Rational prev = 0;
    for (int omega = 3; omega <= 8; ++omega) {
      const Rational ratio(tpica_episode_size(omega, 2, 2), mpta_episode_size(omega, 2, 2));
      CHECK(ratio > prev);
      prev = ratio;
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(mpta_episode_size(2, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(tpica_episode_size(3, 0, 2), std::invalid_argument);
  }
}

TEST_CASE("mpta accounting and invariants") {
  for (const std::string name : {"12K3", "12K4", "12L33", "12G"}) {
    CAPTURE(name);
    const auto g = generate(GameSpec::parse(name));
    const bool leduc = name.find('L') != std::string::npos;
    for (auto rule : {InfosetRule::A, InfosetRule::B}) {
      const auto t = run(g, Method::Mpta, rule);
      CHECK(t.report.accounting_ok());
      CHECK(t.report.total == t.game.num_nodes());
      CHECK(t.report.scale_factor == 1);
      CHECK(check_transform_invariants(t).ok());
      // after the opponent folds in Leduc the team members keep betting
      // between themselves, so those episodes hold repeated team turns
      CHECK(check_episode_bounds(t.report).ok() == !leduc);
      CHECK(validate_public_turn_taking(t.game).ok());
      // the projection matches the construction
      TransformConfig cfg;
      cfg.rule = rule;
      const auto p = project_transform(g, cfg);
      CHECK(p.total == t.report.total);
      CHECK(p.coordinator == t.report.coordinator);
      CHECK(p.adversary == t.report.adversary);
    }
  }
}

TEST_CASE("mpta on 12G matches the reference counts") {
  const auto t = run(generate(GameSpec::parse("12G")), Method::Mpta);
  CHECK(t.report.total == 92581);
  CHECK(t.report.coordinator == 29700);
  CHECK(t.report.adversary == 1464);
}

TEST_CASE("mpta without team decisions copies the game") {
  auto opp = [] { return decide(1, {{"l", "yyy", 0, leaf({0, 2, -1, -1})}, {"r", "yyy", 0, leaf({0, -4, 3, 1})}}); };
  const auto g = build({{"O", Role::Opponent}, {"T1", Role::Team}, {"T2", Role::Team}},
                       chance({{"x", "nnn", Rational(1, 4), opp()}, {"y", "nnn", Rational(3, 4), opp()}}));
  TransformConfig cfg;
  cfg.check_preconditions = false;
  const auto t = mpta(g, cfg);
  CHECK(t.report.dummy == 0);
  CHECK(t.report.coordinator == 0);
  CHECK(t.game.num_nodes() == g.num_nodes());
  for (NodeId h = 0; h < g.num_nodes(); ++h) {
    CHECK(t.game.kind[h] == g.kind[h]);
    if (g.kind[h] != NodeKind::Terminal) continue;
    CHECK(t.game.payoff(h)[kCoordinator2p] == g.payoff(h)[2] + g.payoff(h)[3]);
    CHECK(t.game.payoff(h)[kOpponent2p] == g.payoff(h)[1]);
  }
}

TEST_CASE("coordinator infoset rules on 12K3") {
  const auto g = generate(GameSpec::parse("12K3"));
  const auto orig = compute_infosets(g);

  SUBCASE("rule-A: one infoset per replicated original team node") {
    const auto t = run(g, Method::Mpta, InfosetRule::A);
    CHECK(t.partition.by_player[kCoordinator2p].size() == team_decision_nodes(g));
    const PlayerId member = g.players_with_role(Role::Team).front();
    for (auto id : t.partition.by_player[kCoordinator2p]) {
      std::set<NodeId> origins;
      for (NodeId h : t.partition.infosets[id].nodes) origins.insert(t.lineage.origin[h]);
      CHECK(origins.size() == 1);
      const NodeId o = *origins.begin();
      const auto n = t.partition.infosets[id].nodes.size();
      // |Omega| - 1 = 2 replicas at the first team level; nested dummies multiply deeper levels
      if (g.actor[o] == member && g.depth[o] == 2) CHECK(n == 2);
      CHECK((n == 2 || n == 4 || n == 8));
    }
    CHECK(validate_perfect_recall(t.game, t.partition, kCoordinator2p).ok());
  }
  SUBCASE("rule-B: keyed by acting infoset and hypothesised teammate state") {
    const auto t = run(g, Method::Mpta, InfosetRule::B);
    std::set<std::pair<std::uint32_t, std::uint32_t>> keys;
    for (auto id : t.partition.by_player[kCoordinator2p]) {
      std::set<std::pair<std::uint32_t, std::uint32_t>> k;
      for (NodeId h : t.partition.infosets[id].nodes) k.insert({orig.of(t.lineage.origin[h]), t.lineage.dummy_choice[h]});
      CHECK(k.size() == 1);
      keys.insert(*k.begin());
    }
    CHECK(keys.size() == t.partition.by_player[kCoordinator2p].size());
    // first team level after the opponent's check: 3 own cards x 2 hypothesised teammate cards
    std::set<std::uint32_t> first_level;
    const PlayerId member = g.players_with_role(Role::Team).front();
    for (NodeId h = 0; h < t.game.num_nodes(); ++h) {
      if (t.game.kind[h] != NodeKind::Decision || t.game.actor[h] != kCoordinator2p) continue;
      const NodeId o = t.lineage.origin[h];
      if (t.lineage.member[h] != member || g.depth[o] != 2 || g.child_of(g.parent[o], 0) != o) continue;
      first_level.insert(t.partition.of(h));
    }
    CHECK(first_level.size() == 6);
  }
  SUBCASE("opponent infosets are preserved") {
    for (auto rule : {InfosetRule::A, InfosetRule::B}) {
      const auto t = run(g, Method::Mpta, rule);
      const PlayerId opp = g.players_with_role(Role::Opponent).front();
      CHECK(t.partition.by_player[kOpponent2p].size() == orig.by_player[opp].size());
      for (auto id : t.partition.by_player[kOpponent2p]) {
        std::set<std::uint32_t> images;
        for (NodeId h : t.partition.infosets[id].nodes) images.insert(orig.of(t.lineage.origin[h]));
        CHECK(images.size() == 1);
      }
    }
  }
}

TEST_CASE("tpica on 12K3") {
  const auto g = generate(GameSpec::parse("12K3"));
  const auto t = run(g, Method::Tpica);
  CHECK(t.report.total == 5395);
  CHECK(t.report.coordinator == 300);
  CHECK(t.report.adversary == 294);
  CHECK(t.report.accounting_ok());
  CHECK(check_transform_invariants(t).ok());
  // the first coordinator decision prescribes one action per own card: 2^3 prescriptions
  NodeId first = kNoNode;
  for (NodeId h = 0; h < t.game.num_nodes() && first == kNoNode; ++h)
    if (t.game.kind[h] == NodeKind::Decision && t.game.actor[h] == kCoordinator2p) first = h;
  REQUIRE(first != kNoNode);
  CHECK(t.game.num_actions[first] == 8);
  for (PlayerId p : {kCoordinator2p, kOpponent2p}) CHECK(validate_perfect_recall(t.game, t.partition, p).ok());
}

TEST_CASE("transform preconditions and budgets") {
  SUBCASE("budget rejection happens before construction") {
    TransformConfig cfg;
    cfg.node_budget = 100;
    CHECK_THROWS_AS(transform(generate(GameSpec::parse("12K3")), cfg), ResourceError);
  }
  SUBCASE("two opponents are rejected") {
    CHECK_THROWS(transform(generate(GameSpec::parse("22K4")), TransformConfig{}));
  }
  SUBCASE("micro-corpus games transform cleanly") {
    for (const auto& [name, make] : micro::corpus()) {
      CAPTURE(name);
      const auto g = make();
      for (auto m : {Method::Mpta, Method::Tpica}) {
        const auto t = run(g, m);
        CHECK(t.report.accounting_ok());
        CHECK(check_transform_invariants(t).ok());
      }
    }
  }
}

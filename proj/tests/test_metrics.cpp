#include "doctest.h"
#include "support.hpp"

#include "teamgame/games.hpp"
#include "teamgame/metrics.hpp"
#include "teamgame/micro.hpp"

using namespace teamgame;
using namespace testutil;

namespace {

struct Setup {
  GameTree g;
  InfoSetPartition part;
  TransformResult t;
  PlanMapping m;
};

Setup make(GameTree g, InfosetRule rule) {
  Setup s;
  s.g = std::move(g);
  s.part = compute_infosets(s.g);
  TransformConfig cfg;
  cfg.rule = rule;
  s.t = mpta(s.g, cfg);
  s.m = build_plan_mapping(s.g, s.part, s.t);
  return s;
}

Rational team_value(const Setup& s, const Plan& team, const Plan& opp) {
  return teamgame::detail::role_sum(plan_payoff(s.g, s.part, {&team, &opp}), role_mask(s.g, Role::Team));
}

Rational coordinator_value(const Setup& s, const Plan& coord, const Plan& opp) {
  const Plan topp = map_opponent_plan(s.m, opp);
  return plan_payoff(s.t.game, s.t.partition, {&coord, &topp})[kCoordinator2p];
}

std::vector<char> coordinator_mask(const Setup& s) { return player_mask(s.t.game, {kCoordinator2p}); }

}  // namespace

TEST_CASE("plan mapping tables") {
  const auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::B);
  const auto team = role_mask(s.g, Role::Team);
  std::size_t team_infosets = 0;
  for (const auto& I : s.part.infosets) team_infosets += team[I.player];
  CHECK(s.m.images.size() == team_infosets);
  for (const auto& [I, img] : s.m.images) CHECK(img.size() == 2);  // one per hypothesised teammate card
  CHECK(s.m.opponent_to_transformed.size() == s.part.by_player[1].size());
  TransformConfig cfg;
  cfg.method = Method::Tpica;
  CHECK_THROWS_AS(build_plan_mapping(s.g, s.part, transform(s.g, cfg)), ValidationError);
}

TEST_CASE("rule-A round trip is the identity") {
  const auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::A);
  std::mt19937_64 rng(21);
  const auto opps = enumerate_plans(s.g, s.part, role_mask(s.g, Role::Opponent));
  for (int trial = 0; trial < 5; ++trial) {
    const auto team = random_full_plan(s.g, s.part, role_mask(s.g, Role::Team), rng);
    const auto coord = embed_team_plan(s.m, team);
    const auto back = map_coordinator_plan(s.m, s.part, coord);
    REQUIRE(back.size() == 1);
    CHECK(back[0].weight == 1);
    CHECK(back[0].plan == team);
    for (const auto& opp : opps) CHECK(coordinator_value(s, coord, opp) == team_value(s, team, opp));
  }
}

TEST_CASE("rule-B mapping of coordinator plans") {
  SUBCASE("plans constant across dummy outcomes collapse to one joint plan") {
    const auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::B);
    std::mt19937_64 rng(4);
    const auto team = random_full_plan(s.g, s.part, role_mask(s.g, Role::Team), rng);
    const auto back = map_coordinator_plan(s.m, s.part, embed_team_plan(s.m, team));
    REQUIRE(back.size() == 1);
    CHECK(back[0].plan == team);
  }
  SUBCASE("random coordinator plans keep their value on 12K3") {
    const auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::B);
    std::mt19937_64 rng(8);
    const auto opp_mask = role_mask(s.g, Role::Opponent);
    for (int trial = 0; trial < 200; ++trial) {
      const auto coord = random_full_plan(s.t.game, s.t.partition, coordinator_mask(s), rng);
      const auto opp = random_full_plan(s.g, s.part, opp_mask, rng);
      auto prof = profile_from_plans<Rational>(s.part, {&opp});
      const auto beh = team_behavior_of(s.m, s.part, coord);
      for (std::size_t i = 0; i < s.part.size(); ++i)
        if (!beh.probs[i].empty()) prof.probs[i] = beh.probs[i];
      const auto u = teamgame::detail::role_sum(expected_payoff(s.g, s.part, prof), role_mask(s.g, Role::Team));
      CHECK(coordinator_value(s, coord, opp) / s.t.report.scale_factor == u);
    }
  }
  SUBCASE("explicit mixtures on the micro-corpus") {
    for (const auto& [name, build_game] : micro::corpus()) {
      CAPTURE(name);
      const auto s = make(build_game(), InfosetRule::B);
      std::mt19937_64 rng(13);
      const auto opps = enumerate_plans(s.g, s.part, role_mask(s.g, Role::Opponent));
      for (int trial = 0; trial < 20; ++trial) {
        const auto coord = random_full_plan(s.t.game, s.t.partition, coordinator_mask(s), rng);
        const auto mix = map_coordinator_plan(s.m, s.part, coord);
        Rational total = 0;
        for (const auto& wp : mix) total += wp.weight;
        CHECK(total == 1);
        for (const auto& opp : opps) {
          Rational u = 0;
          for (const auto& wp : mix) u += wp.weight * team_value(s, wp.plan, opp);
          CHECK(coordinator_value(s, coord, opp) == u);
        }
      }
    }
  }
}

TEST_CASE("team mixtures") {
  const auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::B);
  std::mt19937_64 rng(17);
  const auto team_mask = role_mask(s.g, Role::Team);
  const auto a = random_full_plan(s.g, s.part, team_mask, rng), b = random_full_plan(s.g, s.part, team_mask, rng);
  REQUIRE(a != b);

  SUBCASE("point mass") {
    const auto img = map_team_mixture(s.m, {{a, Rational(1)}});
    REQUIRE(img.size() == 1);
    CHECK(img[0].weight == 1);
    CHECK(img[0].plan == embed_team_plan(s.m, a));
  }
  SUBCASE("uniform over two plans") {
    const auto img = map_team_mixture(s.m, {{a, Rational(1, 2)}, {b, Rational(1, 2)}});
    REQUIRE(img.size() == 2);
    for (const auto& wp : img) {
      CHECK(wp.weight == Rational(1, 2));
      CHECK((wp.plan == embed_team_plan(s.m, a) || wp.plan == embed_team_plan(s.m, b)));
    }
  }
  SUBCASE("weights must form a distribution") {
    CHECK_THROWS_AS(map_team_mixture(s.m, {{a, Rational(1, 2)}}), ValidationError);
    CHECK_THROWS_AS(map_team_mixture(s.m, {{a, Rational(3, 2)}, {b, Rational(-1, 2)}}), ValidationError);
  }
  SUBCASE("five-plan mixture keeps its value") {
    std::vector<WeightedPlan> mix;
    const Rational w[5] = {Rational(1, 10), Rational(1, 5), Rational(3, 10), Rational(1, 4), Rational(3, 20)};
    for (int i = 0; i < 5; ++i) mix.push_back({random_full_plan(s.g, s.part, team_mask, rng), w[i]});
    const auto img = map_team_mixture(s.m, mix);
    for (int trial = 0; trial < 50; ++trial) {
      const auto opp = random_full_plan(s.g, s.part, role_mask(s.g, Role::Opponent), rng);
      Rational u = 0, ut = 0;
      for (const auto& wp : mix) u += wp.weight * team_value(s, wp.plan, opp);
      for (const auto& wp : img) ut += wp.weight * coordinator_value(s, wp.plan, opp);
      CHECK(ut / s.t.report.scale_factor == u);
    }
  }
}

TEST_CASE("payoff equivalence checker") {
  SUBCASE("12K3 under both rules") {
    for (auto rule : {InfosetRule::A, InfosetRule::B}) {
      const auto s = make(generate(GameSpec::parse("12K3")), rule);
      const auto rep = check_payoff_equivalence(s.g, s.part, s.t, s.m, 1000, 7);
      CHECK(rep.ok());
      CHECK(rep.checks == 2000);
      CHECK(rep.seed == 7);
      CHECK(!rep.semantics.empty());
    }
  }
  SUBCASE("a corrupted mapping is caught") {
    auto s = make(generate(GameSpec::parse("12K3")), InfosetRule::B);
    // swap the images of two original infosets that have the same action count
    auto first = s.m.images.begin();
    auto other = std::next(first);
    while (other != s.m.images.end() &&
           s.part.infosets[other->first].num_actions() != s.part.infosets[first->first].num_actions())
      ++other;
    REQUIRE(other != s.m.images.end());
    std::swap(first->second, other->second);
    const auto rep = check_payoff_equivalence(s.g, s.part, s.t, s.m, 200, 7);
    CHECK_FALSE(rep.ok());
    CHECK(rep.violations.size() >= 1);
  }
  SUBCASE("no team decisions is vacuous") {
    auto opp = [] { return decide(1, {{"l", "yyy", 0, leaf({0, 2, -1, -1})}, {"r", "yyy", 0, leaf({0, -4, 3, 1})}}); };
    const auto g = build({{"O", Role::Opponent}, {"T1", Role::Team}, {"T2", Role::Team}},
                         chance({{"x", "nnn", Rational(1, 2), opp()}, {"y", "nnn", Rational(1, 2), opp()}}));
    const auto part = compute_infosets(g);
    TransformConfig cfg;
    cfg.check_preconditions = false;
    const auto t = mpta(g, cfg);
    const auto m = build_plan_mapping(g, part, t);
    const auto rep = check_payoff_equivalence(g, part, t, m, 100, 1);
    CHECK(rep.ok());
    CHECK(rep.checks == 0);
  }
}

#include "doctest.h"
#include "support.hpp"

#include "teamgame/games.hpp"
#include "teamgame/micro.hpp"
#include "teamgame/oracle.hpp"
#include "teamgame/transform.hpp"

#include <set>

using namespace teamgame;
using namespace testutil;

namespace {

/** Classic two-player Kuhn poker (J, Q, K; ante 1, bet 1). */
GameTree classic_kuhn() {
  const char* cards = "JQK";
  std::vector<Edge> deals;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const int s = a > b ? 1 : -1;  // showdown sign for player 1
      auto pay = [](int x) { return leaf({0, x, -x}); };
      // private deal: each player sees only its own card, encoded by distinct chance edges per card pair
      Node p1 = decide(1, {{"check", "yy", 0, decide(2, {{"check", "yy", 0, pay(s)},
                                                          {"bet", "yy", 0, decide(1, {{"fold", "yy", 0, pay(-1)}, {"call", "yy", 0, pay(2 * s)}})}})},
                           {"bet", "yy", 0, decide(2, {{"fold", "yy", 0, pay(1)}, {"call", "yy", 0, pay(2 * s)}})}});
      deals.push_back({std::string(1, cards[a]) + cards[b], "nn", Rational(1, 6), p1});
    }
  auto g = build({{"P1", Role::Coordinator}, {"P2", Role::Opponent}}, chance(deals));
  // give each player its own card as the deal token
  TreeBuilder b(g);
  for (std::size_t d = 0; d < 6; ++d) {
    const auto& label = g.label_of(0, d);
    const std::vector<std::uint32_t> tokens{kHidden, b.symbol(std::string("c:") + label[0]), b.symbol(std::string("c:") + label[1])};
    g.observation[g.edge(0, d)] = b.observation(tokens);
  }
  return g;
}

/** Reduced plans by brute force: every full plan with unreachable infosets cleared, deduplicated. */
std::size_t brute_force_reduced(const GameTree& g, const InfoSetPartition& part, PlayerId p) {
  const auto& own = part.by_player[p];
  std::set<Plan> reduced;
  const std::uint64_t total = 1ull << own.size();  // binary actions only
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    Plan full(part.size(), -1);
    for (std::size_t i = 0; i < own.size(); ++i) full[own[i]] = static_cast<std::int32_t>((bits >> i) & 1);
    Plan r(part.size(), -1);
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
      const NodeId h = stack.back();
      stack.pop_back();
      if (g.kind[h] == NodeKind::Decision && g.actor[h] == p) {
        r[part.of(h)] = full[part.of(h)];
        stack.push_back(g.child_of(h, static_cast<std::size_t>(full[part.of(h)])));
        continue;
      }
      for (std::size_t a = 0; a < g.num_actions[h]; ++a) stack.push_back(g.child_of(h, a));
    }
    reduced.insert(r);
  }
  return reduced.size();
}

}  // namespace

TEST_CASE("plan enumeration") {
  SUBCASE("single binary infoset") {
    const auto g = build({{"P1", Role::Coordinator}, {"P2", Role::Opponent}},
                         decide(1, {{"l", "yy", 0, leaf({0, 1, -1})}, {"r", "yy", 0, leaf({0, 0, 0})}}));
    CHECK(enumerate_plans(g, compute_infosets(g), player_mask(g, {1})).size() == 2);
  }
  SUBCASE("classic kuhn agrees with brute-force reduction") {
    const auto g = classic_kuhn();
    const auto part = compute_infosets(g);
    CHECK(part.by_player[1].size() == 6);
    for (PlayerId p : {PlayerId{1}, PlayerId{2}}) {
      const auto n = enumerate_plans(g, part, player_mask(g, {p})).size();
      CHECK(n == brute_force_reduced(g, part, p));
      CHECK(BigInt(n) == count_reduced_plans(g, part, p));
    }
    CHECK(enumerate_plans(g, part, player_mask(g, {1})).size() == 27);
  }
  SUBCASE("12K3 counts") {
    const auto g = generate(GameSpec::parse("12K3"));
    const auto part = compute_infosets(g);
    const auto team = g.players_with_role(Role::Team);
    BigInt product = 1;
    for (PlayerId p = 1; p < g.num_players(); ++p) {
      const auto n = enumerate_plans(g, part, player_mask(g, {p})).size();
      CHECK(BigInt(n) == count_reduced_plans(g, part, p));
      CHECK(n == brute_force_reduced(g, part, p));
      if (g.is_team(p)) product *= n;
    }
    CHECK(count_joint_plans(g, part, team) == product);
    CHECK(product == 4096000);
  }
  SUBCASE("deterministic order and budget") {
    const auto g = generate(GameSpec::parse("12K3"));
    const auto part = compute_infosets(g);
    CHECK(enumerate_plans(g, part, player_mask(g, {1})) == enumerate_plans(g, part, player_mask(g, {1})));
    CHECK_THROWS_AS(enumerate_plans(g, part, player_mask(g, {1}), 10), ResourceError);
    CHECK_THROWS_AS(tmecor_value(g), ResourceError);  // 4,096,000 joint plans
  }
}

TEST_CASE("matrix games") {
  SUBCASE("matching pennies") {
    const auto s = solve_matrix_game({{1, -1}, {-1, 1}});
    CHECK(double(s.value) == doctest::Approx(0.0));
    CHECK(double(s.row[0]) == doctest::Approx(0.5));
  }
  SUBCASE("random games are certified and scale") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> d(-5, 5);
    for (int t = 0; t < 50; ++t) {
      Matrix A(1 + t % 5, std::vector<long double>(1 + (t / 5) % 6));
      for (auto& r : A)
        for (auto& x : r) x = d(rng);
      const auto s = solve_matrix_game(A);
      // the row mixture guarantees the value against every column, the column mixture holds every row to it
      for (std::size_t j = 0; j < A[0].size(); ++j) {
        long double v = 0;
        for (std::size_t i = 0; i < A.size(); ++i) v += s.row[i] * A[i][j];
        CHECK(double(v) >= double(s.value) - 1e-9);
      }
      for (std::size_t i = 0; i < A.size(); ++i) {
        long double v = 0;
        for (std::size_t j = 0; j < A[0].size(); ++j) v += s.col[j] * A[i][j];
        CHECK(double(v) <= double(s.value) + 1e-9);
      }
      Matrix B = A;
      for (auto& r : B)
        for (auto& x : r) x *= 3;
      CHECK(double(solve_matrix_game(B).value) == doctest::Approx(3 * double(s.value)).epsilon(1e-9));
    }
  }
  SUBCASE("two-player normal form value") {
    CHECK(ne_value_2p0s(matching_pennies(), compute_infosets(matching_pennies())).value == doctest::Approx(0.0));
    const auto k = classic_kuhn();
    CHECK(ne_value_2p0s(k, compute_infosets(k)).value == doctest::Approx(-1.0 / 18).epsilon(1e-9));
  }
}

TEST_CASE("team values") {
  SUBCASE("constant payoff") {
    auto t2 = [] { return decide(3, {{"u", "nnn", 0, leaf({0, -1, Rational(1, 2), Rational(1, 2)})}, {"v", "nnn", 0, leaf({0, -1, Rational(1, 2), Rational(1, 2)})}}); };
    auto t1 = [&] { return decide(2, {{"u", "nnn", 0, t2()}, {"v", "nnn", 0, t2()}}); };
    const auto g = build({{"O", Role::Opponent}, {"T1", Role::Team}, {"T2", Role::Team}},
                         decide(1, {{"a", "nnn", 0, t1()}, {"b", "nnn", 0, t1()}}));
    CHECK(tmecor_value(g).value == doctest::Approx(1.0));
  }
  SUBCASE("correlation beats independence, sharing beats correlation") {
    const auto g = micro::separation();
    const auto tme = tmecor_value(g).value;
    const auto ind = independent_value(g);
    const auto full = full_sharing_value(g).value;
    CHECK(tme == doctest::Approx(1.0));
    CHECK(ind.upper < tme);
    CHECK(full > tme + 0.25);
  }
  SUBCASE("mpta normal-form value equals the team value on the micro-corpus") {
    for (const auto& [name, make] : micro::corpus()) {
      CAPTURE(name);
      const auto g = make();
      const auto t = mpta(g);  // rule-B
      const auto v = ne_value_2p0s(t.game, t.partition).value / to_double(t.report.scale_factor);
      CHECK(v == doctest::Approx(tmecor_value(g).value).epsilon(1e-9));
      TransformConfig cfg;
      cfg.method = Method::Tpica;
      const auto tp = transform(g, cfg);
      CHECK(ne_value_2p0s(tp.game, tp.partition).value == doctest::Approx(tmecor_value(g).value).epsilon(1e-9));
    }
  }
  SUBCASE("column generation agrees with enumeration") {
    for (const auto& [name, make] : micro::corpus()) {
      CAPTURE(name);
      const auto g = make();
      const auto cg = tmecor_value_column_generation(g);
      const auto v = tmecor_value(g).value;
      CHECK(cg.lower <= v + 1e-9);
      CHECK(cg.upper >= v - 1e-9);
      CHECK(cg.upper - cg.lower <= 1e-9);
    }
  }
  SUBCASE("12K3 by column generation") {
    const auto cg = tmecor_value_column_generation(generate(GameSpec::parse("12K3")));
    CHECK(cg.upper - cg.lower <= 1e-9);
    CHECK(cg.lower == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("two opponents are rejected") {
    CHECK_THROWS_AS(tmecor_value(generate(GameSpec::parse("22K4"))), ValidationError);
  }
}

// teamgame: command-line front end for generating games, converting team
// games into two-player games, solving, evaluating and verifying.
//
// Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 resource limit.

#include "teamgame/experiment.hpp"
#include "teamgame/metrics.hpp"
#include "teamgame/oracle.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace tg = teamgame;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

tg::GameTree load_or_generate(const std::string& in, const std::string& game) {
  if (!in.empty()) return tg::load_game(in);
  if (!game.empty()) return tg::generate(tg::GameSpec::parse(game));
  throw std::invalid_argument("give --in FILE or --game NAME");
}

tg::InfoSetPartition load_partition(const tg::GameTree& g, const std::string& path) {
  return path.empty() ? tg::compute_infosets(g) : tg::partition_from_json(g, tg::read_json(path));
}

void emit(const tg::Json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else tg::write_json(out, j);
}

tg::Json stats_json(const tg::GameTree& g, const tg::InfoSetPartition& part) {
  tg::Json j;
  std::uint64_t decision = 0, chance = 0, terminal = 0;
  for (tg::NodeId h = 0; h < g.num_nodes(); ++h) {
    if (g.kind[h] == tg::NodeKind::Decision) ++decision;
    else if (g.kind[h] == tg::NodeKind::Chance) ++chance;
    else ++terminal;
  }
  j["nodes"] = g.num_nodes();
  j["decision"] = decision;
  j["chance"] = chance;
  j["terminal"] = terminal;
  j["infosets"] = part.size();
  tg::Json players = tg::Json::array();
  for (tg::PlayerId p = 1; p < g.num_players(); ++p) {
    std::uint64_t n = 0;
    for (const auto& I : part.infosets) n += I.player == p;
    players.push_back({{"id", p},
                       {"name", g.players[p].name},
                       {"infosets", n},
                       {"perfect_recall", tg::validate_perfect_recall(g, part, p).ok()}});
  }
  j["players"] = players;
  j["public_turn_taking"] = tg::validate_public_turn_taking(g).ok();
  return j;
}

tg::Json oracle_json(const tg::OracleValue& v) {
  return {{"value", v.value}, {"rows", v.rows}, {"cols", v.cols}, {"gap", v.solution.gap}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Team-game conversion and solving toolkit"};
  app.require_subcommand(1);

  std::string in, game, out, method = "mpta", rule = "rule-B", ownership = "chance-uniform", partition, report, profile,
                                log, run_a, run_b;
  std::uint64_t iters = 1000, log_every = 10, node_budget = 60'000'000, trials = 1000, seed = 0,
                plan_budget = tg::kDefaultPlanBudget;
  double time_limit = 0, threshold = 0;
  bool no_check = false;

  auto* gen = app.add_subcommand("generate", "Build a benchmark game (e.g. 12K3, 12L3, 12G) and save it");
  gen->add_option("--game", game, "Game name")->required();
  gen->add_option("--out", out, "Output game file")->required();

  auto* tr = app.add_subcommand("transform", "Convert a team game into a coordinator-vs-opponent game");
  tr->add_option("--in", in, "Input game file");
  tr->add_option("--game", game, "Generate this game instead of reading --in");
  tr->add_option("--method", method, "mpta or tpica")->check(CLI::IsMember({"mpta", "tpica"}));
  tr->add_option("--rule", rule, "Coordinator infoset rule for mpta: rule-A or rule-B");
  tr->add_option("--ownership", ownership, "Dummy ownership: chance-uniform or coordinator");
  tr->add_option("--node-budget", node_budget, "Refuse to build more nodes than this");
  tr->add_option("--out", out, "Output game file")->required();
  tr->add_option("--partition", partition, "Write the infoset partition (JSON)");
  tr->add_option("--report", report, "Write the size report (JSON)");
  tr->add_flag("--no-check", no_check, "Skip precondition validation");

  auto* st = app.add_subcommand("stats", "Print node, infoset and validity statistics");
  st->add_option("--in", in, "Game file");
  st->add_option("--game", game, "Generate this game instead");
  st->add_option("--partition", partition, "Infoset partition (default: from observations)");

  auto* so = app.add_subcommand("solve", "Run CFR+ on a two-player zero-sum game");
  so->add_option("--in", in, "Game file");
  so->add_option("--game", game, "Generate this game instead");
  so->add_option("--partition", partition, "Infoset partition (default: from observations)");
  so->add_option("--iters", iters, "Iterations");
  so->add_option("--log-every", log_every, "Exploitability logging period");
  so->add_option("--time-limit-ms", time_limit, "Stop after this much solver time");
  so->add_option("--log", log, "Write the convergence log (CSV)");
  so->add_option("--profile", profile, "Write the average profile (JSON)");

  auto* ev = app.add_subcommand("eval", "Exploitability and value of a saved profile");
  ev->add_option("--in", in, "Game file")->required();
  ev->add_option("--partition", partition, "Infoset partition");
  ev->add_option("--profile", profile, "Profile (JSON)")->required();

  auto* ve = app.add_subcommand("verify", "Check a conversion: invariants, size bounds, payoff equivalence");
  ve->add_option("--in", in, "Original game file");
  ve->add_option("--game", game, "Generate this game instead");
  ve->add_option("--method", method, "mpta or tpica")->check(CLI::IsMember({"mpta", "tpica"}));
  ve->add_option("--rule", rule, "rule-A or rule-B");
  ve->add_option("--trials", trials, "Random plan pairs for the payoff-equivalence check");
  ve->add_option("--seed", seed, "Random seed");
  ve->add_option("--report", report, "Write the verification result (JSON)");

  auto* orc = app.add_subcommand("oracle", "Exact game values by normal-form linear programming");
  std::string oracle_kind;
  orc->add_option("kind", oracle_kind, "tmecor, column-generation, nevalue, independent or full-sharing")
      ->required()
      ->check(CLI::IsMember({"tmecor", "column-generation", "nevalue", "independent", "full-sharing"}));
  orc->add_option("--in", in, "Game file");
  orc->add_option("--game", game, "Generate this game instead");
  orc->add_option("--partition", partition, "Infoset partition (nevalue)");
  orc->add_option("--plan-budget", plan_budget, "Maximum plans to enumerate");

  auto* ex = app.add_subcommand("run", "Generate, convert, solve and persist all artifacts");
  ex->add_option("--game", game, "Game name")->required();
  ex->add_option("--method", method, "mpta or tpica")->check(CLI::IsMember({"mpta", "tpica"}));
  ex->add_option("--rule", rule, "rule-A or rule-B");
  ex->add_option("--ownership", ownership, "chance-uniform or coordinator");
  ex->add_option("--iters", iters, "Iterations");
  ex->add_option("--log-every", log_every, "Exploitability logging period");
  ex->add_option("--time-limit-ms", time_limit, "Stop after this much solver time");
  ex->add_option("--node-budget", node_budget, "Refuse to build more nodes than this");
  ex->add_option("--seed", seed, "Recorded seed");
  ex->add_option("--out", out, "Output directory")->required();

  auto* cmp = app.add_subcommand("compare", "Compare two run records (baseline / other)");
  cmp->add_option("baseline", run_a, "record.json of the baseline run")->required();
  cmp->add_option("other", run_b, "record.json of the other run")->required();
  cmp->add_option("--threshold", threshold, "Exploitability threshold for the time ratio");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      tg::save_game(out, tg::generate(tg::GameSpec::parse(game)));
      return 0;
    }
    if (*tr) {
      const auto g = load_or_generate(in, game);
      tg::TransformConfig cfg;
      cfg.method = tg::parse_method(method);
      cfg.rule = tg::parse_rule(rule);
      cfg.ownership = tg::parse_ownership(ownership);
      cfg.node_budget = node_budget;
      cfg.check_preconditions = !no_check;
      const auto t = tg::transform(g, cfg);
      tg::save_game(out, t.game);
      if (!partition.empty()) tg::write_json(partition, tg::partition_to_json(t.partition, t.report.rule));
      emit(tg::to_json(t.report), report);
      return 0;
    }
    if (*st) {
      const auto g = load_or_generate(in, game);
      std::cout << stats_json(g, load_partition(g, partition)).dump(2) << "\n";
      return 0;
    }
    if (*so) {
      const auto g = load_or_generate(in, game);
      const auto part = load_partition(g, partition);
      tg::CfrConfig cc;
      cc.iterations = iters;
      cc.log_every = log_every;
      cc.time_limit_ms = time_limit;
      const auto res = tg::cfr_plus(g, part, cc);
      if (!log.empty()) {
        std::ofstream os(log);
        tg::write_log_csv(os, res.log, tg::Rational(1));
      }
      if (!profile.empty()) tg::write_json(profile, tg::profile_to_json(res.average));
      const auto v = tg::expected_payoff(g, part, res.average);
      std::cout << tg::Json{{"iterations", res.log.empty() ? 0 : res.log.back().iteration},
                            {"exploitability", res.final_exploitability},
                            {"value_first", v[tg::two_players(g).first]}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (*ev) {
      const auto g = tg::load_game(in);
      const auto part = load_partition(g, partition);
      const auto prof = tg::profile_from_json(tg::read_json(profile));
      const auto e = tg::exploitability(g, part, prof);
      const auto v = tg::expected_payoff(g, part, prof);
      std::cout << tg::Json{{"exploitability", e.value},
                            {"best_response_first", e.br_first},
                            {"best_response_second", e.br_second},
                            {"value_first", v[tg::two_players(g).first]}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (*ve) {
      const auto g = load_or_generate(in, game);
      const auto orig_part = tg::compute_infosets(g);
      tg::TransformConfig cfg;
      cfg.method = tg::parse_method(method);
      cfg.rule = tg::parse_rule(rule);
      const auto t = tg::transform(g, cfg);
      const auto inv = tg::check_transform_invariants(t);
      const auto bounds = tg::check_episode_bounds(t.report);
      tg::Json j{{"invariants", inv.ok()}, {"episode_bounds", bounds.ok()}, {"report", tg::to_json(t.report)}};
      if (!inv.ok()) j["invariant_problems"] = inv.summary(20);
      if (!bounds.ok()) j["episode_bound_problems"] = bounds.summary(20);
      bool ok = inv.ok() && bounds.ok();
      if (cfg.method == tg::Method::Mpta) {
        const auto m = tg::build_plan_mapping(g, orig_part, t);
        const auto eq = tg::check_payoff_equivalence(g, orig_part, t, m, trials, seed);
        j["payoff_equivalence"] = {{"checks", eq.checks}, {"violations", eq.violations.size()}, {"seed", eq.seed}};
        ok = ok && eq.ok();
      }
      j["ok"] = ok;
      emit(j, report);
      if (!report.empty()) std::cout << (ok ? "ok" : "FAILED") << "\n";
      return ok ? 0 : kExitCheckFailed;
    }
    if (*orc) {
      const auto g = load_or_generate(in, game);
      tg::Json j;
      if (oracle_kind == "tmecor") j = oracle_json(tg::tmecor_value(g, plan_budget));
      else if (oracle_kind == "full-sharing") j = oracle_json(tg::full_sharing_value(g, plan_budget));
      else if (oracle_kind == "nevalue") j = oracle_json(tg::ne_value_2p0s(g, load_partition(g, partition), plan_budget));
      else if (oracle_kind == "independent") {
        const auto v = tg::independent_value(g);
        j = {{"lower", v.lower}, {"upper", v.upper}, {"grid_points", v.grid_points}};
      } else {
        const auto v = tg::tmecor_value_column_generation(g);
        j = {{"lower", v.lower}, {"upper", v.upper}, {"iterations", v.iterations}};
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*ex) {
      tg::ExperimentSpec spec;
      spec.game = game;
      spec.transform.method = tg::parse_method(method);
      spec.transform.rule = tg::parse_rule(rule);
      spec.transform.ownership = tg::parse_ownership(ownership);
      spec.transform.node_budget = node_budget;
      spec.iterations = iters;
      spec.log_every = log_every;
      spec.time_limit_ms = time_limit;
      spec.seed = seed;
      spec.out_dir = out;
      const auto rec = tg::run_experiment(spec);
      std::cout << tg::Json{{"total", rec.report.total},
                            {"final_exploitability", rec.final_exploitability},
                            {"final_value", rec.final_value}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (*cmp) {
      auto load_run = [](const std::string& path) {
        const auto j = tg::read_json(path);
        tg::RunRecord r;
        r.spec.game = j.at("spec").at("game").get<std::string>();
        r.report = tg::report_from_json(j.at("report"));
        for (const auto& row : j.at("log")) r.log.push_back({row[0].get<std::uint64_t>(), row[1].get<double>(), row[2].get<double>()});
        return r;
      };
      const auto c = tg::compare_methods(load_run(run_a), load_run(run_b), threshold);
      std::cout << tg::to_json(c).dump(2) << "\n";
      return c.flagged ? kExitCheckFailed : 0;
    }
  } catch (const tg::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

#pragma once

// Experiment harness: JSON/CSV artifacts (reports, partitions, profiles,
// convergence logs), the generate -> transform -> solve -> evaluate pipeline,
// and method comparison by exact tree-size ratios.

#include "teamgame/games.hpp"
#include "teamgame/serialize.hpp"
#include "teamgame/solver.hpp"
#include "teamgame/transform.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace teamgame {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// artifacts

inline Json to_json(const TransformReport& r) {
  Json j;
  j["method"] = r.method;
  j["rule"] = r.rule;
  j["ownership"] = r.ownership;
  j["total"] = r.total;
  j["coordinator"] = r.coordinator;
  j["adversary"] = r.adversary;
  j["dummy"] = r.dummy;
  j["chance"] = r.chance;
  j["terminal"] = r.terminal;
  j["scale_factor"] = to_string(r.scale_factor);
  j["max_episode_bound"] = r.max_episode_bound;
  Json eps = Json::object();
  for (const auto& [size, n] : r.episode_sizes) eps[std::to_string(size)] = n;
  j["episode_sizes"] = eps;
  return j;
}

inline TransformReport report_from_json(const Json& j) {
  TransformReport r;
  r.method = j.at("method").get<std::string>();
  r.rule = j.at("rule").get<std::string>();
  r.ownership = j.at("ownership").get<std::string>();
  r.total = j.at("total").get<std::uint64_t>();
  r.coordinator = j.at("coordinator").get<std::uint64_t>();
  r.adversary = j.at("adversary").get<std::uint64_t>();
  r.dummy = j.at("dummy").get<std::uint64_t>();
  r.chance = j.at("chance").get<std::uint64_t>();
  r.terminal = j.at("terminal").get<std::uint64_t>();
  r.scale_factor = parse_rational(j.at("scale_factor").get<std::string>());
  r.max_episode_bound = j.value("max_episode_bound", std::uint64_t{0});
  if (j.contains("episode_sizes"))
    for (const auto& [k, v] : j["episode_sizes"].items()) r.episode_sizes[std::stoull(k)] = v.get<std::uint64_t>();
  return r;
}

inline constexpr const char* kPartitionFormat = "teamgame-partition/1";
inline constexpr const char* kProfileFormat = "teamgame-profile/1";

/** Partition as the infoset id of every node (-1 for chance and terminal nodes). */
inline Json partition_to_json(const InfoSetPartition& part, const std::string& rule) {
  Json ids = Json::array();
  for (auto id : part.node_infoset) ids.push_back(id == kNoInfoSet ? std::int64_t{-1} : std::int64_t{id});
  return Json{{"format", kPartitionFormat}, {"rule", rule}, {"node_infoset", ids}};
}

/** Rebuilds a partition with identical ids (ids are assigned in first-occurrence order). */
inline InfoSetPartition partition_from_json(const GameTree& g, const Json& j) {
  if (j.value("format", std::string()) != kPartitionFormat) throw ValidationError("not a partition file");
  const auto& ids = j.at("node_infoset");
  if (ids.size() != g.num_nodes()) throw ValidationError("partition node count differs from the game");
  std::vector<std::int64_t> v = ids.get<std::vector<std::int64_t>>();
  for (NodeId h = 0; h < g.num_nodes(); ++h)
    if ((g.kind[h] == NodeKind::Decision) != (v[h] >= 0))
      throw ValidationError("partition assigns node " + std::to_string(h) + " inconsistently");
  auto part = partition_by_key(g, [&](NodeId h) { return v[h]; });
  for (NodeId h = 0; h < g.num_nodes(); ++h)
    if (v[h] >= 0 && part.of(h) != static_cast<std::uint32_t>(v[h]))
      throw ValidationError("partition ids are not in first-occurrence order");
  return part;
}

inline Json profile_to_json(const BehavioralProfile& prof) {
  Json probs = Json::array();
  for (const auto& v : prof.probs) probs.push_back(v);
  return Json{{"format", kProfileFormat}, {"average", prof.average}, {"infosets", probs}};
}

inline BehavioralProfile profile_from_json(const Json& j) {
  if (j.value("format", std::string()) != kProfileFormat) throw ValidationError("not a profile file");
  BehavioralProfile prof;
  prof.average = j.value("average", false);
  for (const auto& v : j.at("infosets")) prof.probs.push_back(v.get<std::vector<double>>());
  return prof;
}

inline Json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return Json::parse(is);
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
}

inline constexpr const char* kLogHeader = "iteration,elapsed_ms,exploitability,payoff_scale";

inline void write_log_csv(std::ostream& os, const std::vector<LogRow>& rows, const Rational& scale) {
  os << kLogHeader << "\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.iteration << "," << r.elapsed_ms << "," << r.exploitability << "," << to_string(scale);
    os << line.str() << "\n";
  }
}

// ---------------------------------------------------------------------------
// experiments

struct ExperimentSpec {
  std::string game = "12K3";
  TransformConfig transform;
  std::uint64_t iterations = 0;
  double time_limit_ms = 0;
  std::uint64_t log_every = 10;
  std::string out_dir;  // empty: nothing persisted
  std::uint64_t seed = 0;

  void validate() const {
    GameSpec::parse(game).validate();
    if (log_every == 0) throw std::invalid_argument("log_every must be positive");
    if (time_limit_ms < 0) throw std::invalid_argument("time limit must be non-negative");
  }
};

struct EnvironmentFingerprint {
  unsigned cores = 0;
  std::uint64_t memory_bytes = 0;
};

inline EnvironmentFingerprint environment_fingerprint() {
  EnvironmentFingerprint e;
  e.cores = std::thread::hardware_concurrency();
  const long pages = sysconf(_SC_PHYS_PAGES), size = sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && size > 0) e.memory_bytes = static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(size);
  return e;
}

struct RunRecord {
  ExperimentSpec spec;
  std::uint64_t original_nodes = 0;
  TransformReport report;
  std::vector<LogRow> log;
  double final_exploitability = std::numeric_limits<double>::quiet_NaN();
  double final_value = std::numeric_limits<double>::quiet_NaN();  // coordinator expected payoff of the average profile
  double transform_ms = 0;
  EnvironmentFingerprint environment;
};

inline Json to_json(const RunRecord& r) {
  Json j;
  j["spec"] = {{"game", r.spec.game},
               {"method", method_name(r.spec.transform.method)},
               {"rule", rule_name(r.spec.transform.rule)},
               {"ownership", ownership_name(r.spec.transform.ownership)},
               {"iterations", r.spec.iterations},
               {"time_limit_ms", r.spec.time_limit_ms},
               {"log_every", r.spec.log_every},
               {"seed", r.spec.seed}};
  j["original_nodes"] = r.original_nodes;
  j["report"] = to_json(r.report);
  Json rows = Json::array();
  for (const auto& row : r.log) rows.push_back({row.iteration, row.elapsed_ms, row.exploitability});
  j["log"] = rows;
  j["final_exploitability"] = std::isnan(r.final_exploitability) ? Json() : Json(r.final_exploitability);
  j["final_value"] = std::isnan(r.final_value) ? Json() : Json(r.final_value);
  j["transform_ms"] = r.transform_ms;
  j["environment"] = {{"cores", r.environment.cores}, {"memory_bytes", r.environment.memory_bytes}};
  return j;
}

/** Largest action count over the game's decision nodes. */
inline int max_actions(const GameTree& g) {
  int a = 1;
  for (NodeId h = 0; h < g.num_nodes(); ++h)
    if (g.kind[h] == NodeKind::Decision) a = std::max<int>(a, g.num_actions[h]);
  return a;
}

/**
 * generate -> (size check) -> transform -> CFR+ -> evaluate, persisting
 * original.tg, transformed.tg, partition.json, report.json, profile.json,
 * log.csv and record.json under `out_dir` when set.
 */
inline RunRecord run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  RunRecord rec;
  rec.spec = spec;
  rec.environment = environment_fingerprint();
  const auto gs = GameSpec::parse(spec.game);
  const GameTree g = generate(gs);
  rec.original_nodes = g.num_nodes();
  const auto projected = project_transform(g, spec.transform);
  if (projected.total > spec.transform.node_budget) {
    const int omega = static_cast<int>(g.omega.size()), team = static_cast<int>(g.players_with_role(Role::Team).size());
    throw ResourceError("projected " + std::string(method_name(spec.transform.method)) + " size " +
                            std::to_string(projected.total) + " exceeds the node budget " +
                            std::to_string(spec.transform.node_budget) + " (|Omega|=" + std::to_string(omega) +
                            ", |T|=" + std::to_string(team) + ", |A|=" + std::to_string(max_actions(g)) + ")",
                        BigInt(projected.total));
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = transform(g, spec.transform);
  rec.transform_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rec.report = t.report;
  namespace fs = std::filesystem;
  if (!spec.out_dir.empty()) {
    fs::create_directories(spec.out_dir);
    save_game((fs::path(spec.out_dir) / "original.tg").string(), g);
    save_game((fs::path(spec.out_dir) / "transformed.tg").string(), t.game);
    write_json((fs::path(spec.out_dir) / "partition.json").string(), partition_to_json(t.partition, t.report.rule));
    write_json((fs::path(spec.out_dir) / "report.json").string(), to_json(t.report));
  }
  if (spec.iterations > 0 || spec.time_limit_ms > 0) {
    CfrConfig cc;
    cc.iterations = spec.iterations ? spec.iterations : std::numeric_limits<std::uint64_t>::max();
    cc.time_limit_ms = spec.time_limit_ms;
    cc.log_every = spec.log_every;
    auto res = cfr_plus(t.game, t.partition, cc);
    rec.log = res.log;
    rec.final_exploitability = res.final_exploitability;
    rec.final_value = expected_payoff(t.game, t.partition, res.average)[kCoordinator2p];
    if (!spec.out_dir.empty()) {
      write_json((fs::path(spec.out_dir) / "profile.json").string(), profile_to_json(res.average));
      std::ofstream os(fs::path(spec.out_dir) / "log.csv");
      write_log_csv(os, rec.log, t.report.scale_factor);
    }
  }
  if (!spec.out_dir.empty()) write_json((fs::path(spec.out_dir) / "record.json").string(), to_json(rec));
  return rec;
}

struct MethodComparison {
  std::string game;
  std::string baseline_method, method;  // ratio = baseline / method
  Rational node_ratio;                  // exact total-node ratio
  double time_to_threshold_ratio = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0;
  bool flagged = false;  // MPTA total not strictly smaller than TPICA total
};

namespace detail {

inline double time_to_threshold(const std::vector<LogRow>& log, double threshold) {
  for (const auto& r : log)
    if (r.exploitability <= threshold) return r.elapsed_ms;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/**
 * Ratios of `baseline` over `other` (same game): exact total-node ratio and,
 * when both logs reach `threshold`, the time-to-threshold ratio.  Flags an
 * MPTA/TPICA pair where MPTA is not strictly smaller.
 */
inline MethodComparison compare_methods(const RunRecord& baseline, const RunRecord& other, double threshold = 0) {
  if (baseline.spec.game != other.spec.game) throw std::invalid_argument("compared runs use different games");
  MethodComparison c;
  c.game = baseline.spec.game;
  c.baseline_method = baseline.report.method;
  c.method = other.report.method;
  if (other.report.total == 0) throw std::invalid_argument("empty transform report");
  c.node_ratio = Rational(BigInt(baseline.report.total), BigInt(other.report.total));
  c.threshold = threshold;
  const double tb = detail::time_to_threshold(baseline.log, threshold), to = detail::time_to_threshold(other.log, threshold);
  if (!std::isnan(tb) && !std::isnan(to) && to > 0) c.time_to_threshold_ratio = tb / to;
  else if (!std::isnan(tb) && !std::isnan(to)) c.time_to_threshold_ratio = 1;
  const RunRecord* mpta_run = baseline.report.method == "mpta" ? &baseline : other.report.method == "mpta" ? &other : nullptr;
  const RunRecord* tpica_run = baseline.report.method == "tpica" ? &baseline : other.report.method == "tpica" ? &other : nullptr;
  if (mpta_run && tpica_run && mpta_run != tpica_run) c.flagged = !(mpta_run->report.total < tpica_run->report.total);
  return c;
}

inline Json to_json(const MethodComparison& c) {
  return Json{{"game", c.game},
              {"baseline", c.baseline_method},
              {"method", c.method},
              {"node_ratio", to_string(c.node_ratio)},
              {"node_ratio_decimal", to_double(c.node_ratio)},
              {"time_to_threshold_ratio", std::isnan(c.time_to_threshold_ratio) ? Json() : Json(c.time_to_threshold_ratio)},
              {"threshold", c.threshold},
              {"flagged_mpta_not_smaller", c.flagged}};
}

}  // namespace teamgame

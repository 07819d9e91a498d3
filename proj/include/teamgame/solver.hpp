#pragma once

// CFR+ (vanilla full traversal, regret-matching-plus, alternating updates,
// linear averaging) plus exact best response and exploitability for
// two-player zero-sum games with perfect recall.

#include "teamgame/payoff.hpp"
#include "teamgame/transform.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace teamgame {

/** The two strategic players of a transformed game (coordinator first when present). */
inline std::pair<PlayerId, PlayerId> two_players(const GameTree& g) {
  if (g.num_players() != 3) throw ValidationError("expected a two-player game (plus chance)");
  const auto coord = g.players_with_role(Role::Coordinator);
  if (coord.size() == 1) return {coord[0], static_cast<PlayerId>(coord[0] == 1 ? 2 : 1)};
  return {1, 2};
}

inline void require_perfect_recall(const GameTree& g, const InfoSetPartition& part) {
  for (PlayerId p = 1; p < g.num_players(); ++p) {
    const auto d = validate_perfect_recall(g, part, p);
    if (!d.ok())
      throw ValidationError("partition violates perfect recall for player " + std::to_string(p) + ": " +
                            d.summary(1));
  }
}

/** Flat per-infoset storage. */
struct InfosetTable {
  std::vector<std::size_t> offset;  // size = #infosets + 1
  explicit InfosetTable(const InfoSetPartition& part) {
    offset.resize(part.size() + 1, 0);
    for (std::size_t i = 0; i < part.size(); ++i) offset[i + 1] = offset[i] + part.infosets[i].num_actions();
  }
  std::size_t size() const { return offset.back(); }
};

struct BestResponse {
  Plan plan;     // responder's reduced pure plan (-1 elsewhere)
  double value;  // responder's expected payoff
};

/**
 * Exact best response of `responder` against `fixed` (which must cover the
 * other players' infosets) by one bottom-up pass; ties go to the lowest
 * action index.  Requires perfect recall for the responder.
 */
inline BestResponse best_response(const GameTree& g, const InfoSetPartition& part, PlayerId responder,
                                  const BehavioralProfile& fixed, const std::vector<char>& utility = {}) {
  // `utility` (optional, indexed by player) selects whose summed payoff the responder maximises
  auto payoff_of = [&](NodeId z) {
    const auto& u = g.payoff_d(z);
    if (utility.empty()) return u[responder];
    double s = 0.0;
    for (std::size_t p = 1; p < u.size(); ++p)
      if (utility[p]) s += u[p];
    return s;
  };
  const auto pr = validate_perfect_recall(g, part, responder);
  if (!pr.ok()) throw ValidationError("best response needs perfect recall: " + pr.summary(1));
  const std::size_t n = g.num_nodes();
  // reach of chance and the other player; own-history length for ordering
  std::vector<double> reach(n, 0.0);
  std::vector<std::uint32_t> own_len(n, 0);
  reach[0] = 1.0;
  for (NodeId h = 0; h < n; ++h) {
    const auto k = g.num_actions[h];
    for (std::size_t a = 0; a < k; ++a) {
      const NodeId c = g.child_of(h, a);
      own_len[c] = own_len[h];
      if (g.kind[h] == NodeKind::Chance) reach[c] = reach[h] * g.chance_prob(g.edge(h, a));
      else if (g.actor[h] == responder) reach[c] = reach[h], own_len[c] = own_len[h] + 1;
      else {
        const auto& v = fixed.probs[part.of(h)];
        if (v.size() != k) throw ValidationError("fixed profile misses infoset " + std::to_string(part.of(h)));
        reach[c] = reach[h] * v[a];
      }
    }
  }
  std::vector<std::int32_t> choice(part.size(), -1);
  std::vector<double> memo(n, std::numeric_limits<double>::quiet_NaN());
  // value below h given decided responder choices (all deeper responder infosets are decided)
  std::function<double(NodeId)> eval = [&](NodeId h) -> double {
    if (!std::isnan(memo[h])) return memo[h];
    double v = 0.0;
    const auto k = g.num_actions[h];
    switch (g.kind[h]) {
      case NodeKind::Terminal: v = payoff_of(h); break;
      case NodeKind::Chance:
        for (std::size_t a = 0; a < k; ++a) v += g.chance_prob(g.edge(h, a)) * eval(g.child_of(h, a));
        break;
      case NodeKind::Decision:
        if (g.actor[h] == responder) {
          const auto c = choice[part.of(h)];
          if (c < 0) throw std::logic_error("best response evaluated an undecided infoset");
          v = eval(g.child_of(h, static_cast<std::size_t>(c)));
        } else {
          const auto& p = fixed.probs[part.of(h)];
          for (std::size_t a = 0; a < k; ++a)
            if (p[a] != 0.0) v += p[a] * eval(g.child_of(h, a));
        }
        break;
    }
    return memo[h] = v;
  };
  // decide infosets from the longest own history to the shortest
  std::vector<std::uint32_t> order = part.by_player[responder];
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return own_len[part.infosets[x].nodes.front()] > own_len[part.infosets[y].nodes.front()];
  });
  for (auto id : order) {
    const auto& is = part.infosets[id];
    std::vector<double> q(is.num_actions(), 0.0);
    for (NodeId h : is.nodes) {
      if (reach[h] == 0.0) continue;
      for (std::size_t a = 0; a < q.size(); ++a) q[a] += reach[h] * eval(g.child_of(h, a));
    }
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.size(); ++a)
      if (q[a] > q[best] + 1e-12 * std::max(1.0, std::fabs(q[best]))) best = a;
    choice[id] = static_cast<std::int32_t>(best);
  }
  BestResponse br;
  br.value = eval(0);
  // reduce: keep only infosets reachable under the responder's own choices
  br.plan.assign(part.size(), -1);
  std::vector<char> live(n, 0);
  live[0] = 1;
  for (NodeId h = 0; h < n; ++h) {
    if (!live[h]) continue;
    const auto k = g.num_actions[h];
    if (g.kind[h] == NodeKind::Decision && g.actor[h] == responder) {
      const auto c = choice[part.of(h)];
      br.plan[part.of(h)] = c;
      live[g.child_of(h, static_cast<std::size_t>(c))] = 1;
    } else {
      for (std::size_t a = 0; a < k; ++a) live[g.child_of(h, a)] = 1;
    }
  }
  return br;
}

struct ExploitabilityReport {
  double value = 0.0;  // sum of both best-response values (transformed-game units)
  double br_first = 0.0, br_second = 0.0;
  Rational scale_factor = 1;
};

/** u_1(BR_1, sigma_2) + u_2(sigma_1, BR_2) for the two strategic players. */
inline ExploitabilityReport exploitability(const GameTree& g, const InfoSetPartition& part,
                                           const BehavioralProfile& profile, Rational scale = 1) {
  const auto [p1, p2] = two_players(g);
  ExploitabilityReport r;
  r.br_first = best_response(g, part, p1, profile).value;
  r.br_second = best_response(g, part, p2, profile).value;
  r.value = r.br_first + r.br_second;
  r.scale_factor = scale;
  return r;
}

struct LogRow {
  std::uint64_t iteration = 0;
  double elapsed_ms = 0.0;
  double exploitability = 0.0;
};

struct CfrConfig {
  std::uint64_t iterations = 1000;
  std::uint64_t log_every = 10;  // 0 disables periodic logging (final row still emitted)
  bool log = true;
  bool allow_imperfect_recall = false;  // diagnostics only; needs a custom evaluator
  double time_limit_ms = 0;             // optional wall-clock budget on solver time (0 = none)
};

struct CfrResult {
  BehavioralProfile average;
  BehavioralProfile current;
  std::vector<LogRow> log;
  double final_exploitability = 0.0;
};

/** Regret-matching-plus CFR over a fixed partition. */
class CfrPlus {
 public:
  /** `allow_imperfect_recall` is a diagnostics-only opt-in; CFR+ guarantees need perfect recall. */
  CfrPlus(const GameTree& g, const InfoSetPartition& part, bool allow_imperfect_recall = false)
      : g_(g), part_(part), table_(part) {
    if (!allow_imperfect_recall) require_perfect_recall(g, part);
    std::tie(first_, second_) = two_players(g);
    regret_.assign(table_.size(), 0.0);
    strategy_sum_.assign(table_.size(), 0.0);
    sigma_.assign(table_.size(), 0.0);
    reach_own_.assign(g.num_nodes(), 0.0);
    reach_other_.assign(g.num_nodes(), 0.0);
    value_.assign(g.num_nodes(), 0.0);
    update_sigma();
  }

  std::uint64_t iteration() const { return t_; }

  /** One iteration; odd iterations update the first player (coordinator), even the second. */
  void step() {
    ++t_;
    const PlayerId traverser = (t_ % 2 == 1) ? first_ : second_;
    traverse(traverser);
    for (auto id : part_.by_player[traverser])
      for (std::size_t j = table_.offset[id]; j < table_.offset[id + 1]; ++j) regret_[j] = std::max(regret_[j], 0.0);
    update_sigma();
  }

  BehavioralProfile current_profile() const { return to_profile(sigma_, false); }

  BehavioralProfile average_profile() const {
    auto prof = to_profile(strategy_sum_, true);
    prof.average = true;
    return prof;
  }

  const std::vector<double>& regrets() const { return regret_; }
  const std::vector<double>& strategy_sums() const { return strategy_sum_; }

 private:
  void update_sigma() {
    for (std::size_t id = 0; id < part_.size(); ++id) {
      const auto b = table_.offset[id], e = table_.offset[id + 1];
      double s = 0.0;
      for (auto j = b; j < e; ++j) s += regret_[j];
      for (auto j = b; j < e; ++j) sigma_[j] = s > 0.0 ? regret_[j] / s : 1.0 / static_cast<double>(e - b);
    }
  }

  BehavioralProfile to_profile(const std::vector<double>& flat, bool normalize) const {
    BehavioralProfile prof;
    prof.probs.resize(part_.size());
    for (std::size_t id = 0; id < part_.size(); ++id) {
      const auto b = table_.offset[id], e = table_.offset[id + 1];
      auto& v = prof.probs[id];
      v.assign(flat.begin() + static_cast<std::ptrdiff_t>(b), flat.begin() + static_cast<std::ptrdiff_t>(e));
      if (normalize) {
        double s = 0.0;
        for (double x : v) s += x;
        for (double& x : v) x = s > 0.0 ? x / s : 1.0 / static_cast<double>(v.size());
      }
    }
    return prof;
  }

  void traverse(PlayerId traverser) {
    const std::size_t n = g_.num_nodes();
    reach_own_[0] = reach_other_[0] = 1.0;
    for (NodeId h = 0; h < n; ++h) {
      const auto k = g_.num_actions[h];
      if (k == 0) continue;
      const auto base = g_.kind[h] == NodeKind::Decision ? table_.offset[part_.of(h)] : 0;
      for (std::size_t a = 0; a < k; ++a) {
        const NodeId c = g_.child_of(h, a);
        if (g_.kind[h] == NodeKind::Chance) {
          reach_own_[c] = reach_own_[h];
          reach_other_[c] = reach_other_[h] * g_.chance_prob(g_.edge(h, a));
        } else if (g_.actor[h] == traverser) {
          reach_own_[c] = reach_own_[h] * sigma_[base + a];
          reach_other_[c] = reach_other_[h];
        } else {
          reach_own_[c] = reach_own_[h];
          reach_other_[c] = reach_other_[h] * sigma_[base + a];
        }
      }
    }
    const double weight = static_cast<double>(t_);
    for (NodeId h = static_cast<NodeId>(n); h-- > 0;) {
      const auto k = g_.num_actions[h];
      if (g_.kind[h] == NodeKind::Terminal) {
        value_[h] = g_.payoff_d(h)[traverser];
        continue;
      }
      double v = 0.0;
      if (g_.kind[h] == NodeKind::Chance) {
        for (std::size_t a = 0; a < k; ++a) v += g_.chance_prob(g_.edge(h, a)) * value_[g_.child_of(h, a)];
      } else {
        const auto base = table_.offset[part_.of(h)];
        for (std::size_t a = 0; a < k; ++a) v += sigma_[base + a] * value_[g_.child_of(h, a)];
        if (g_.actor[h] == traverser) {
          const double ro = reach_other_[h];
          const double rw = weight * reach_own_[h];
          for (std::size_t a = 0; a < k; ++a) {
            regret_[base + a] += ro * (value_[g_.child_of(h, a)] - v);
            strategy_sum_[base + a] += rw * sigma_[base + a];
          }
        }
      }
      value_[h] = v;
    }
  }

  const GameTree& g_;
  const InfoSetPartition& part_;
  InfosetTable table_;
  PlayerId first_ = 1, second_ = 2;
  std::uint64_t t_ = 0;
  std::vector<double> regret_, strategy_sum_, sigma_;
  std::vector<double> reach_own_, reach_other_, value_;
};

using CfrLogger = std::function<void(const LogRow&)>;
using ProfileEvaluator = std::function<double(const BehavioralProfile&)>;

/**
 * Runs CFR+ for `cfg.iterations` iterations (or until the time budget),
 * logging the average profile's exploitability at iteration 0, every
 * `log_every` iterations, and at the end.
 * Elapsed time excludes the time spent evaluating exploitability.
 */
inline CfrResult cfr_plus(const GameTree& g, const InfoSetPartition& part, const CfrConfig& cfg,
                          const CfrLogger& logger = {}, const ProfileEvaluator& evaluator = {}) {
  if (cfg.allow_imperfect_recall && !evaluator && cfg.log)
    throw std::invalid_argument("imperfect-recall runs need an explicit exploitability evaluator");
  CfrPlus solver(g, part, cfg.allow_imperfect_recall);
  auto evaluate = [&](const BehavioralProfile& p) {
    return evaluator ? evaluator(p) : exploitability(g, part, p).value;
  };
  CfrResult res;
  double elapsed = 0.0;
  auto record = [&](std::uint64_t it) {
    LogRow row{it, elapsed, evaluate(it == 0 ? solver.current_profile() : solver.average_profile())};
    if (!res.log.empty() && row.elapsed_ms <= res.log.back().elapsed_ms)
      row.elapsed_ms = std::nextafter(res.log.back().elapsed_ms, std::numeric_limits<double>::infinity());
    res.log.push_back(row);
    if (logger) logger(row);
  };
  if (cfg.log) record(0);
  for (std::uint64_t it = 1; it <= cfg.iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    solver.step();
    elapsed += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const bool out_of_time = cfg.time_limit_ms > 0 && elapsed >= cfg.time_limit_ms;
    const bool last = it == cfg.iterations || out_of_time;
    if (cfg.log && (last || (cfg.log_every && it % cfg.log_every == 0))) record(it);
    if (out_of_time) break;
  }
  res.average = solver.iteration() ? solver.average_profile() : solver.current_profile();
  res.current = solver.current_profile();
  res.final_exploitability =
      !res.log.empty()                             ? res.log.back().exploitability
      : (cfg.allow_imperfect_recall && !evaluator) ? std::numeric_limits<double>::quiet_NaN()
                                                   : evaluate(res.average);
  return res;
}

}  // namespace teamgame

#pragma once

// Ground-truth values on small games: exact payoff matrices over reduced
// plans, a dense simplex for matrix games with a certified duality gap,
// the team-maxmin value with correlation, the normal-form value of a
// two-player transformed game, the independent-play value (bracketed), and
// the full-information-sharing value.  Games whose joint team plan set is
// too large to enumerate use exact column generation instead.

#include "teamgame/plans.hpp"
#include "teamgame/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace teamgame {

using Matrix = std::vector<std::vector<long double>>;

struct MatrixGameSolution {
  long double value = 0;         // row player's (maximiser's) value
  std::vector<long double> row;  // row player's optimal mixture
  std::vector<long double> col;  // column player's optimal mixture
  long double gap = 0;           // certified: max_j (A y)_j - min_k (x^T A)_k
};

namespace detail {

/** max 1^T q s.t. B q <= 1, q >= 0 (B > 0) by tableau simplex with Bland's rule. */
inline MatrixGameSolution solve_positive(const Matrix& B) {
  const std::size_t m = B.size(), n = B[0].size();
  const std::size_t cols = n + m + 1;  // variables q, slacks, rhs
  std::vector<std::vector<long double>> T(m + 1, std::vector<long double>(cols, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i][j] = B[i][j];
    T[i][n + i] = 1;
    T[i][cols - 1] = 1;
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -1;  // objective row (reduced costs)
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  const long double eps = 1e-15L;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > 100000 + 50 * (m + n)) throw std::runtime_error("simplex iteration limit reached");
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (T[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    long double best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= eps) continue;
      const long double r = T[i][cols - 1] / T[i][enter];
      if (leave == m || r < best - eps || (std::fabs(r - best) <= eps && basis[i] < basis[leave])) {
        leave = i;
        best = r;
      }
    }
    if (leave == m) throw std::runtime_error("matrix game LP unbounded (should not happen)");
    const long double piv = T[leave][enter];
    for (auto& x : T[leave]) x /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      const long double f = T[i][enter];
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  MatrixGameSolution s;
  std::vector<long double> q(n, 0), p(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) q[basis[i]] = T[i][cols - 1];
  for (std::size_t i = 0; i < m; ++i) p[i] = T[m][n + i];
  long double z = 0, zp = 0;
  for (auto x : q) z += x;
  for (auto x : p) zp += x;
  if (z <= 0 || zp <= 0) throw std::runtime_error("degenerate matrix game solution");
  s.value = 1 / z;
  s.col.resize(n);
  s.row.resize(m);
  for (std::size_t j = 0; j < n; ++j) s.col[j] = q[j] / z;
  for (std::size_t i = 0; i < m; ++i) s.row[i] = std::max<long double>(0, p[i]) / zp;
  return s;
}

}  // namespace detail

/**
 * Value and optimal mixtures of the zero-sum matrix game A (row maximises),
 * with the duality gap of the returned mixtures certified.
 */
inline MatrixGameSolution solve_matrix_game(const Matrix& A) {
  if (A.empty() || A[0].empty()) throw std::invalid_argument("empty matrix game");
  const std::size_t m = A.size(), n = A[0].size();
  for (const auto& r : A)
    if (r.size() != n) throw std::invalid_argument("ragged payoff matrix");
  // orient so the tableau has min(m, n) constraint rows
  const bool transpose = m > n;
  Matrix M;
  if (transpose) {
    M.assign(n, std::vector<long double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) M[j][i] = -A[i][j];
  } else {
    M = A;
  }
  long double lo = std::numeric_limits<long double>::infinity();
  for (const auto& r : M)
    for (auto x : r) lo = std::min(lo, x);
  const long double shift = 1 - lo;
  for (auto& r : M)
    for (auto& x : r) x += shift;
  auto s = detail::solve_positive(M);
  s.value -= shift;
  if (transpose) {
    s.value = -s.value;
    std::swap(s.row, s.col);
  }
  // certify
  long double worst_row = std::numeric_limits<long double>::infinity(), best_col = -worst_row;
  for (std::size_t j = 0; j < n; ++j) {
    long double v = 0;
    for (std::size_t i = 0; i < m; ++i) v += s.row[i] * A[i][j];
    worst_row = std::min(worst_row, v);
  }
  for (std::size_t i = 0; i < m; ++i) {
    long double v = 0;
    for (std::size_t j = 0; j < n; ++j) v += A[i][j] * s.col[j];
    best_col = std::max(best_col, v);
  }
  s.gap = best_col - worst_row;
  long double scale = 1;
  for (const auto& r : A)
    for (auto x : r) scale = std::max(scale, std::fabs(x));
  if (s.gap > 1e-9L * scale || s.gap < -1e-9L * scale)
    throw std::runtime_error("matrix game solution failed certification (gap " + std::to_string(double(s.gap)) + ")");
  return s;
}

/** Exact payoff matrix of the `value_players` sum over row plans x column plans. */
inline std::vector<std::vector<Rational>> payoff_matrix(const GameTree& g, const InfoSetPartition& part,
                                                        const std::vector<Plan>& rows, const std::vector<Plan>& cols,
                                                        const std::vector<char>& value_players) {
  std::vector<std::vector<Rational>> U(rows.size(), std::vector<Rational>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) U[i][j] = plans_value(g, part, rows[i], cols[j], value_players);
  return U;
}

inline Matrix to_matrix(const std::vector<std::vector<Rational>>& U) {
  Matrix M(U.size());
  for (std::size_t i = 0; i < U.size(); ++i)
    for (const auto& x : U[i]) M[i].push_back(static_cast<long double>(to_double(x)));
  return M;
}

struct OracleValue {
  double value = 0;
  std::size_t row_plans = 0, col_plans = 0;
  MatrixGameSolution solution;
  std::vector<Plan> rows, cols;
  std::vector<std::vector<Rational>> payoffs;
};

/** Maxmin value of `maximisers` (summed payoff) against `minimisers` over reduced plans. */
inline OracleValue normal_form_value(const GameTree& g, const InfoSetPartition& part, const std::vector<char>& maximisers,
                                     const std::vector<char>& minimisers, std::uint64_t budget = kDefaultPlanBudget) {
  OracleValue r;
  r.rows = enumerate_plans(g, part, maximisers, budget);
  r.cols = enumerate_plans(g, part, minimisers, budget);
  const BigInt cells = BigInt(r.rows.size()) * BigInt(r.cols.size());
  if (cells > BigInt(budget) * 16) throw ResourceError("payoff matrix exceeds budget", cells);
  r.row_plans = r.rows.size();
  r.col_plans = r.cols.size();
  r.payoffs = payoff_matrix(g, part, r.rows, r.cols, maximisers);
  r.solution = solve_matrix_game(to_matrix(r.payoffs));
  r.value = static_cast<double>(r.solution.value);
  return r;
}

inline void require_single_opponent(const GameTree& g) {
  if (g.players_with_role(Role::Opponent).size() != 1) throw ValidationError("oracle needs exactly one opponent");
  if (g.players_with_role(Role::Team).size() < 2) throw ValidationError("oracle needs a team of at least two");
}

/** Team-maxmin value with correlation: the team mixes over joint reduced plans. */
inline OracleValue tmecor_value(const GameTree& g, std::uint64_t budget = kDefaultPlanBudget) {
  require_single_opponent(g);
  const auto part = compute_infosets(g);
  const auto team = g.players_with_role(Role::Team);
  const BigInt joint = count_joint_plans(g, part, team);
  if (joint > BigInt(budget)) throw ResourceError("joint team plan count exceeds budget", joint);
  return normal_form_value(g, part, role_mask(g, Role::Team), role_mask(g, Role::Opponent), budget);
}

/** Normal-form value for the first strategic player (coordinator) of a two-player game. */
inline OracleValue ne_value_2p0s(const GameTree& g, const InfoSetPartition& part,
                                 std::uint64_t budget = kDefaultPlanBudget) {
  if (g.num_players() != 3) throw ValidationError("expected a two-player game (plus chance)");
  const auto coord = g.players_with_role(Role::Coordinator);
  const PlayerId first = coord.size() == 1 ? coord[0] : 1;
  const PlayerId second = first == 1 ? 2 : 1;
  return normal_form_value(g, part, player_mask(g, {first}), player_mask(g, {second}), budget);
}

struct IndependentValue {
  double lower = 0, upper = 0;  // bracket of max over product mixtures of min over opponent plans
  std::size_t grid_points = 0;
};

/**
 * Team value when members mix independently (two members).  The member with
 * fewer plans is swept over a simplex grid of resolution 1/`resolution`; for
 * each grid point the other member's optimal mixture is an exact LP.  The
 * upper bound adds the Lipschitz slack (payoff range times the grid's L1
 * covering radius).
 */
inline IndependentValue independent_value(const GameTree& g, std::size_t resolution = 200,
                                          std::uint64_t budget = kDefaultPlanBudget) {
  require_single_opponent(g);
  const auto team = g.players_with_role(Role::Team);
  if (team.size() != 2) throw ValidationError("independent-play value implemented for two members");
  const auto part = compute_infosets(g);
  auto p1 = enumerate_plans(g, part, player_mask(g, {team[0]}), budget);
  auto p2 = enumerate_plans(g, part, player_mask(g, {team[1]}), budget);
  const auto opp = enumerate_plans(g, part, role_mask(g, Role::Opponent), budget);
  bool swapped = p1.size() > p2.size();
  if (swapped) std::swap(p1, p2);
  const auto tmask = role_mask(g, Role::Team);
  // U[i][j][k]
  std::vector<std::vector<std::vector<long double>>> U(p1.size(), std::vector<std::vector<long double>>(p2.size()));
  long double range = 0;
  for (std::size_t i = 0; i < p1.size(); ++i)
    for (std::size_t j = 0; j < p2.size(); ++j) {
      Plan joint = p1[i];
      for (std::size_t x = 0; x < joint.size(); ++x)
        if (p2[j][x] >= 0) joint[x] = p2[j][x];
      for (const auto& o : opp) {
        const auto v = static_cast<long double>(to_double(plans_value(g, part, joint, o, tmask)));
        U[i][j].push_back(v);
        range = std::max(range, std::fabs(v));
      }
    }
  const std::size_t k = p1.size();
  IndependentValue out;
  out.lower = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> c(k, 0);
  auto eval = [&]() {
    Matrix M(p2.size(), std::vector<long double>(opp.size(), 0));
    for (std::size_t i = 0; i < k; ++i) {
      if (!c[i]) continue;
      const long double w = static_cast<long double>(c[i]) / static_cast<long double>(resolution);
      for (std::size_t j = 0; j < p2.size(); ++j)
        for (std::size_t o = 0; o < opp.size(); ++o) M[j][o] += w * U[i][j][o];
    }
    out.lower = std::max(out.lower, static_cast<double>(solve_matrix_game(M).value));
    ++out.grid_points;
  };
  // compositions of `resolution` into k parts
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == k) {
      c[i] = left;
      eval();
      return;
    }
    for (std::size_t x = 0; x <= left; ++x) {
      c[i] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, resolution);
  // any mixture is within L1 distance (k-1)/resolution of a grid point; the
  // value is Lipschitz in L1 with constant max |payoff|
  out.upper = out.lower + static_cast<double>(range) * static_cast<double>(k - 1) / static_cast<double>(resolution);
  return out;
}

/**
 * Realisation-equivalent behavioural strategy of a perfect-recall player
 * mixing over reduced plans with weights `w`: at each infoset the
 * probability of an action is the weight of plans choosing it over the
 * weight of plans reaching the infoset (uniform where no plan reaches it).
 */
inline void mixture_to_behavior(const InfoSetPartition& part, PlayerId player, const std::vector<Plan>& plans,
                                const std::vector<long double>& w, BehavioralProfile& out) {
  if (out.probs.size() != part.size()) out.probs.resize(part.size());
  for (auto id : part.by_player[player]) {
    const auto k = part.infosets[id].num_actions();
    std::vector<long double> mass(k, 0);
    long double total = 0;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      if (plans[i][id] < 0 || w[i] <= 0) continue;
      mass[static_cast<std::size_t>(plans[i][id])] += w[i];
      total += w[i];
    }
    auto& v = out.probs[id];
    v.assign(k, 1.0 / static_cast<double>(k));
    if (total > 0)
      for (std::size_t a = 0; a < k; ++a) v[a] = static_cast<double>(mass[a] / total);
  }
}

struct ColumnGenerationValue {
  double lower = 0, upper = 0;  // certified bracket on the team-maxmin value with correlation
  std::size_t iterations = 0;
  std::size_t opponent_plans = 0;
  std::vector<Plan> team_plans;  // generated joint plans (rows of the final master problem)
  MatrixGameSolution master;
};

/**
 * Team-maxmin value with correlation by column generation over joint team
 * plans (two members).  The master problem is the matrix game restricted to
 * the generated joint plans against all opponent plans; its value is a
 * lower bound.  A joint best response to the master's opponent mixture
 * (every plan of the member with fewer plans, each completed by an exact
 * best response of the other member) is an upper bound and supplies the
 * next column.  Stops when the bracket closes to `tol`.
 */
inline ColumnGenerationValue tmecor_value_column_generation(const GameTree& g, double tol = 1e-9,
                                                            std::size_t max_iterations = 10000,
                                                            std::uint64_t budget = kDefaultPlanBudget) {
  require_single_opponent(g);
  const auto team = g.players_with_role(Role::Team);
  if (team.size() != 2) throw ValidationError("column generation implemented for two team members");
  const PlayerId opp = g.players_with_role(Role::Opponent)[0];
  const auto part = compute_infosets(g);
  for (PlayerId p = 1; p < g.num_players(); ++p) {
    const auto d = validate_perfect_recall(g, part, p);
    if (!d.ok()) throw ValidationError("column generation needs perfect recall: " + d.summary(1));
  }
  PlayerId sweep = team[0], other = team[1];
  if (count_reduced_plans(g, part, sweep) > count_reduced_plans(g, part, other)) std::swap(sweep, other);
  const auto sweep_plans = enumerate_plans(g, part, player_mask(g, {sweep}), budget);
  const auto opp_plans = enumerate_plans(g, part, player_mask(g, {opp}), budget);
  const auto tmask = role_mask(g, Role::Team);
  ColumnGenerationValue out;
  out.opponent_plans = opp_plans.size();
  std::vector<std::vector<Rational>> rows;
  long double scale = 1;
  for (const auto& u : g.payoffs_d) {
    double s = 0;
    for (std::size_t p = 1; p < u.size(); ++p)
      if (tmask[p]) s += u[p];
    scale = std::max<long double>(scale, std::fabs(s));
  }

  // joint best response against an opponent behavioural strategy
  auto joint_best_response = [&](const BehavioralProfile& opp_behavior, double& value) {
    Plan best_plan;
    value = -std::numeric_limits<double>::infinity();
    BehavioralProfile fixed = opp_behavior;
    for (const auto& p1 : sweep_plans) {
      for (auto id : part.by_player[sweep]) {
        const auto k = part.infosets[id].num_actions();
        fixed.probs[id].assign(k, 0.0);
        fixed.probs[id][p1[id] >= 0 ? static_cast<std::size_t>(p1[id]) : 0] = 1.0;
      }
      const auto br = best_response(g, part, other, fixed, tmask);
      if (br.value > value + 1e-12 * static_cast<double>(scale)) {
        value = br.value;
        best_plan = p1;
        for (auto id : part.by_player[other]) best_plan[id] = br.plan[id];
      }
    }
    return best_plan;
  };

  // seed with the best response to a uniform opponent
  BehavioralProfile opp_behavior = uniform_profile<double>(part);
  double w = 0;
  Plan next = joint_best_response(opp_behavior, w);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    out.team_plans.push_back(next);
    rows.emplace_back();
    for (const auto& o : opp_plans) rows.back().push_back(plans_value(g, part, next, o, tmask));
    out.master = solve_matrix_game(to_matrix(rows));
    out.iterations = it + 1;
    mixture_to_behavior(part, opp, opp_plans, out.master.col, opp_behavior);
    next = joint_best_response(opp_behavior, w);
    out.lower = static_cast<double>(out.master.value);
    out.upper = w;
    if (w - out.lower <= tol * static_cast<double>(scale)) return out;
  }
  throw std::runtime_error("column generation did not close the bracket within the iteration limit");
}

/**
 * Copy of `g` in which every team member observes everything any team
 * member observes (a combined token per edge), so the team acts on pooled
 * information.
 */
inline GameTree share_team_information(const GameTree& g) {
  GameTree s = g;
  s.observations = {};
  const auto team = g.players_with_role(Role::Team);
  for (std::uint64_t e = 0; e < g.child.size(); ++e) {
    std::vector<std::uint32_t> tok(g.num_players());
    bool any = false;
    std::string combined;
    for (std::size_t i = 0; i < team.size(); ++i) {
      const auto t = g.token(e, team[i]);
      any = any || t != kHidden;
      combined += (i ? "|" : "") + (t == kHidden ? std::string("-") : g.symbols[t]);
    }
    for (PlayerId p = 0; p < g.num_players(); ++p) tok[p] = g.token(e, p);
    if (any) {
      const auto sym = s.symbols.intern(combined);
      for (auto p : team) tok[p] = sym;
    }
    s.observation[e] = s.observations.intern(tok);
  }
  s.validate();
  return s;
}

/** Team value when members pool all their information (then mix jointly). */
inline OracleValue full_sharing_value(const GameTree& g, std::uint64_t budget = kDefaultPlanBudget) {
  return tmecor_value(share_team_information(g), budget);
}

}  // namespace teamgame

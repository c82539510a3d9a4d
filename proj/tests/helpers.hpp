#pragma once

// Shared test oracles and instance generators. Everything here is
// deliberately independent of the library's solver paths: enumeration,
// permutation greedy, brute-force search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "congsolve/cournot.hpp"
#include "congsolve/game.hpp"
#include "congsolve/integral_solver.hpp"

namespace testutil {

using namespace congsolve;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double rand_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Weighted coverage function: rho(U) = sum of weights of sets hit by U.
// Monotone, submodular and normalized by construction; weights are multiples
// of `unit`, so every rank value is too.
inline Polymatroid random_coverage_polymatroid(std::mt19937_64& rng, int m, const Rational& unit,
                                               int max_weight_units = 4, int num_sets = 3) {
  Subset full = (Subset{1} << m) - 1;
  std::vector<Subset> sets;
  std::vector<Rational> weights;
  for (int j = 0; j < num_sets; ++j) {
    Subset s = static_cast<Subset>(rand_int(rng, 1, static_cast<int>(full)));
    sets.push_back(s);
    weights.push_back(Rational(rand_int(rng, 1, max_weight_units)) * unit);
  }
  std::vector<Rational> table(std::size_t{1} << m);
  for (Subset u = 1; u <= full; ++u) {
    Rational value;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (u & sets[j]) value += weights[j];
    }
    table[u] = value;
  }
  return Polymatroid::explicit_table(m, std::move(table));
}

inline CostFunction random_cost(std::mt19937_64& rng, int max_degree, double scale) {
  std::vector<double> coef(static_cast<std::size_t>(rand_int(rng, 1, max_degree + 1)));
  for (double& c : coef) c = rand_real(rng, 0.0, scale);
  return CostFunction(coef);
}

struct RandomGameSpec {
  int players = 2;
  int resources = 2;
  bool simplex_only = false;
  int max_degree = 2;         // polynomial degree of the costs
  double coef_scale = 1.0;
  Rational k = Rational(1, 2);
  int max_demand_packets = 4;
};

inline Game random_game(std::mt19937_64& rng, const RandomGameSpec& spec) {
  const int m = spec.resources;
  Subset full = (Subset{1} << m) - 1;
  std::vector<PlayerSpec> players;
  for (int i = 0; i < spec.players; ++i) {
    Polymatroid poly;
    if (spec.simplex_only || rand_int(rng, 0, 1) == 0) {
      Subset allowed = static_cast<Subset>(rand_int(rng, 1, static_cast<int>(full)));
      Rational rank = Rational(rand_int(rng, 1, 2 * spec.max_demand_packets)) * spec.k;
      poly = Polymatroid::simplex(m, allowed, rank);
    } else {
      poly = random_coverage_polymatroid(rng, m, spec.k);
    }
    Rational cap = poly.rank_ground();
    std::int64_t cap_packets = (cap / spec.k).floor().convert_to<std::int64_t>();
    std::int64_t target =
        std::min<std::int64_t>(cap_packets, rand_int(rng, 0, spec.max_demand_packets));
    players.push_back(PlayerSpec{Rational(target) * spec.k, std::move(poly)});
  }
  std::vector<std::vector<CostFunction>> costs(spec.players);
  for (int i = 0; i < spec.players; ++i) {
    for (int e = 0; e < m; ++e) {
      costs[i].push_back(random_cost(rng, spec.max_degree, spec.coef_scale));
    }
  }
  std::vector<std::string> names;
  for (int e = 0; e < m; ++e) names.push_back("e" + std::to_string(e + 1));
  return Game(std::move(names), std::move(players), std::move(costs));
}

// True when x_i + k on resource e still satisfies every rank constraint.
inline bool placement_feasible(const Polymatroid& p, const LoadVector& x, int e,
                               const Rational& k) {
  LoadVector y = x;
  y[e] += k;
  if (p.is_simplex()) {
    if (!(p.allowed_mask() & (Subset{1} << e))) return false;
    Rational total;
    for (const Rational& v : y) total += v;
    return total <= p.simplex_rank();
  }
  Subset full = (Subset{1} << p.ground_size()) - 1;
  for (Subset u = 1; u <= full; ++u) {
    if (!(u & (Subset{1} << e))) continue;
    Rational sum;
    for (int r = 0; r < p.ground_size(); ++r) {
      if (u & (Subset{1} << r)) sum += y[r];
    }
    if (sum > p.rank(u)) return false;
  }
  return true;
}

inline Profile random_integral_profile(std::mt19937_64& rng, const Game& g, const Rational& k) {
  std::vector<std::vector<std::int64_t>> counts(
      g.num_players(), std::vector<std::int64_t>(g.num_resources(), 0));
  for (int i = 0; i < g.num_players(); ++i) {
    LoadVector x(g.num_resources());
    std::int64_t target = (g.demand(i) / k).floor().convert_to<std::int64_t>();
    for (std::int64_t packet = 0; packet < target; ++packet) {
      std::vector<int> feasible;
      for (int e = 0; e < g.num_resources(); ++e) {
        if (placement_feasible(g.strategy_space(i), x, e, k)) feasible.push_back(e);
      }
      REQUIRE(!feasible.empty());
      int e = feasible[rand_int(rng, 0, static_cast<int>(feasible.size()) - 1)];
      x[e] += k;
      counts[i][e] += 1;
    }
  }
  return Profile::integral(k, std::move(counts));
}

// All k-integral strategies of one player (m small, demand small).
inline std::vector<std::vector<std::int64_t>> enumerate_integral_strategies(const Polymatroid& p,
                                                                            const Rational& d,
                                                                            const Rational& k) {
  std::int64_t target = (d / k).floor().convert_to<std::int64_t>();
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> counts(p.ground_size(), 0);
  auto rec = [&](auto&& self, int e, std::int64_t remaining) -> void {
    if (e == p.ground_size()) {
      if (remaining != 0) return;
      LoadVector x(p.ground_size());
      for (int r = 0; r < p.ground_size(); ++r) x[r] = Rational(counts[r]) * k;
      if (is_in_base(p, d, x)) out.push_back(counts);
      return;
    }
    for (std::int64_t c = 0; c <= remaining; ++c) {
      counts[e] = c;
      self(self, e + 1, remaining - c);
    }
    counts[e] = 0;
  };
  rec(rec, 0, target);
  return out;
}

// Every vertex of the base polytope, by running the rank-increment greedy
// over all resource orders.
inline std::vector<LoadVector> base_vertices(const Polymatroid& p, const Rational& d) {
  std::vector<int> order(p.ground_size());
  std::iota(order.begin(), order.end(), 0);
  std::set<std::string> seen;
  std::vector<LoadVector> vertices;
  do {
    LoadVector x(p.ground_size());
    Rational assigned;
    Subset prefix = 0;
    Rational prev;
    for (int e : order) {
      prefix |= Subset{1} << e;
      Rational inc = p.rank(prefix) - prev;
      prev = p.rank(prefix);
      Rational remaining = d - assigned;
      if (remaining < inc) inc = remaining;
      x[e] = inc;
      assigned += inc;
    }
    if (assigned == d) {
      std::string key;
      for (const Rational& v : x) key += v.str() + ";";
      if (seen.insert(key).second) vertices.push_back(std::move(x));
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return vertices;
}

// Brute-force search for the largest a = p/q <= 1 (q bounded) dividing every
// value; the reference for rho_gcd on small fixtures.
inline Rational brute_rho_gcd(const std::vector<Rational>& values, int max_den = 64) {
  Rational best;
  bool found = false;
  for (int q = 1; q <= max_den; ++q) {
    for (int p = 1; p <= q; ++p) {
      Rational a(p, q);
      bool ok = true;
      for (const Rational& v : values) {
        if (v.is_zero()) continue;
        if (!(v / a).is_integer()) {
          ok = false;
          break;
        }
      }
      if (ok && (!found || a > best)) {
        best = a;
        found = true;
      }
    }
  }
  return found ? best : Rational(1);
}

// All-pairs polymatroid axiom check; the quantifier-complete reference for
// Polymatroid::validate on small ground sets.
inline bool exhaustive_polymatroid_ok(const Polymatroid& p) {
  Subset full = (Subset{1} << p.ground_size()) - 1;
  if (!p.rank(0).is_zero()) return false;
  for (Subset u = 0; u <= full; ++u) {
    for (Subset v = 0; v <= full; ++v) {
      if ((u & v) == u && p.rank(u) > p.rank(v)) return false;  // u subset of v
      if (p.rank(u) + p.rank(v) < p.rank(u | v) + p.rank(u & v)) return false;
    }
  }
  return true;
}

// Cheapest deviation cost of player i over her k-integral strategies.
inline double brute_best_deviation(const Game& g, const Profile& x, int i, const Rational& k) {
  auto strategies = enumerate_integral_strategies(g.strategy_space(i), g.demand(i), k);
  REQUIRE(!strategies.empty());
  double kd = k.to_double();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& counts : strategies) {
    std::vector<double> y(g.num_resources());
    for (int e = 0; e < g.num_resources(); ++e) y[e] = static_cast<double>(counts[e]) * kd;
    best = std::min(best, deviation_cost(g, x, i, y));
  }
  return best;
}

// Exact-equilibrium check by full enumeration of unilateral deviations.
inline bool is_exact_integral_equilibrium(const Game& g, const Profile& x, const Rational& k,
                                          double tol) {
  for (int i = 0; i < g.num_players(); ++i) {
    if (player_cost(g, x, i) > brute_best_deviation(g, x, i, k) + tol) return false;
  }
  return true;
}

// Dense grid search over simplex strategy spaces with up to three allowed
// resources; reference for the continuous best response.
inline double grid_best_deviation(const Game& g, const Profile& x, int i, double step) {
  const Polymatroid& p = g.strategy_space(i);
  REQUIRE(p.is_simplex());
  std::vector<int> allowed;
  for (int e = 0; e < g.num_resources(); ++e) {
    if (p.allowed_mask() & (Subset{1} << e)) allowed.push_back(e);
  }
  REQUIRE(allowed.size() <= 3);
  double d = g.demand(i).to_double();
  std::vector<double> y(g.num_resources(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  auto probe = [&] { best = std::min(best, deviation_cost(g, x, i, y)); };
  if (allowed.size() == 1) {
    y[allowed[0]] = d;
    probe();
    return best;
  }
  long steps = std::lround(d / step);
  if (allowed.size() == 2) {
    for (long a = 0; a <= steps; ++a) {
      double t = d * static_cast<double>(a) / static_cast<double>(steps);
      y[allowed[0]] = t;
      y[allowed[1]] = d - t;
      probe();
    }
    return best;
  }
  for (long a = 0; a <= steps; ++a) {
    for (long b = 0; a + b <= steps; ++b) {
      double t1 = d * static_cast<double>(a) / static_cast<double>(steps);
      double t2 = d * static_cast<double>(b) / static_cast<double>(steps);
      y[allowed[0]] = t1;
      y[allowed[1]] = t2;
      y[allowed[2]] = d - t1 - t2;
      probe();
    }
  }
  return best;
}

}  // namespace testutil

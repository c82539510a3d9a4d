#include "congsolve/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace congsolve {

namespace {

constexpr int kMaxFrankWolfeIters = 100000;
constexpr int kLineSearchBisections = 60;

// d/dtheta of player i's cost along y + theta*(v - y), opponents fixed.
double segment_derivative(const Game& g, int i, const std::vector<double>& opp,
                          const std::vector<double>& y, const std::vector<double>& dir,
                          double theta) {
  double s = 0.0;
  for (std::size_t e = 0; e < y.size(); ++e) {
    if (dir[e] == 0.0) continue;
    double own = y[e] + theta * dir[e];
    double aggregate = opp[e] + own;
    s += dir[e] * detail::marginal_at(g.cost(i, static_cast<int>(e)), aggregate, own);
  }
  return s;
}

}  // namespace

std::vector<double> continuous_best_response(const Game& g, int player, const Profile& x,
                                             double tol) {
  if (player < 0 || player >= g.num_players()) throw InputError("player index out of range");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  const int m = g.num_resources();
  std::vector<double> opp(m);
  for (int e = 0; e < m; ++e) opp[e] = x.total_load(e) - x.load(player, e);

  const Polymatroid& poly = g.strategy_space(player);
  const Rational& d = g.demand(player);
  if (d.is_zero()) return std::vector<double>(m, 0.0);

  // Start from the greedy vertex for the empty-own-load marginals.
  std::vector<double> weights(m);
  for (int e = 0; e < m; ++e) weights[e] = g.cost(player, e)(opp[e]);
  LoadVector start = greedy_linear_min(poly, d, weights);
  std::vector<double> y(m);
  for (int e = 0; e < m; ++e) y[e] = start[e].to_double();

  std::vector<double> grad(m), dir(m);
  double gap = 0.0;
  for (int iter = 0; iter < kMaxFrankWolfeIters; ++iter) {
    for (int e = 0; e < m; ++e) {
      grad[e] = detail::marginal_at(g.cost(player, e), opp[e] + y[e], y[e]);
    }
    LoadVector vertex = greedy_linear_min(poly, d, grad);
    gap = 0.0;
    for (int e = 0; e < m; ++e) {
      dir[e] = vertex[e].to_double() - y[e];
      gap -= grad[e] * dir[e];
    }
    if (gap <= tol) return y;

    double theta = 1.0;
    if (segment_derivative(g, player, opp, y, dir, 1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < kLineSearchBisections; ++b) {
        double mid = 0.5 * (lo + hi);
        if (segment_derivative(g, player, opp, y, dir, mid) > 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      theta = 0.5 * (lo + hi);
    }
    for (int e = 0; e < m; ++e) y[e] += theta * dir[e];
  }
  throw InternalError("continuous best response did not converge; last duality gap " +
                      std::to_string(gap));
}

GapCertificate epsilon_gap(const Game& g, const Profile& x, double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  if (!profile_feasible(g, x)) throw InputError("epsilon_gap: infeasible profile");
  GapCertificate cert;
  cert.tol = tol;
  cert.players.resize(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    std::vector<double> best = continuous_best_response(g, i, x, tol);
    if (!is_in_base_within(g.strategy_space(i), g.demand(i), best, 1e-9)) {
      throw InternalError("best-response witness left the base polytope");
    }
    double gap = player_cost(g, x, i) - deviation_cost(g, x, i, best);
    if (gap < 0.0) {
      if (-gap > tol + 1e-6) {
        throw InternalError("continuous solve beat its own tolerance: gap " +
                            std::to_string(gap));
      }
      gap = 0.0;
    }
    cert.players[i].gap = gap;
    cert.players[i].witness = std::move(best);
    cert.max_gap = std::max(cert.max_gap, gap);
  }
  return cert;
}

namespace {

// Exact max flow (BFS augmenting paths) on a dense residual matrix.
class ExactMaxFlow {
 public:
  explicit ExactMaxFlow(int nodes) : n_(nodes), cap_(nodes, std::vector<BigInt>(nodes)) {}

  void add(int from, int to, const BigInt& capacity) { cap_[from][to] += capacity; }

  BigInt run(int source, int sink) {
    BigInt total = 0;
    while (true) {
      std::vector<int> parent(n_, -1);
      parent[source] = source;
      std::deque<int> queue{source};
      while (!queue.empty() && parent[sink] < 0) {
        int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < n_; ++v) {
          if (parent[v] < 0 && cap_[u][v] > 0) {
            parent[v] = u;
            queue.push_back(v);
          }
        }
      }
      if (parent[sink] < 0) return total;
      BigInt bottleneck = 0;
      for (int v = sink; v != source; v = parent[v]) {
        const BigInt& c = cap_[parent[v]][v];
        if (bottleneck == 0 || c < bottleneck) bottleneck = c;
      }
      for (int v = sink; v != source; v = parent[v]) {
        cap_[parent[v]][v] -= bottleneck;
        cap_[v][parent[v]] += bottleneck;
      }
      total += bottleneck;
    }
  }

  const BigInt& residual(int from, int to) const { return cap_[from][to]; }

 private:
  int n_;
  std::vector<std::vector<BigInt>> cap_;
};

}  // namespace

Transshipment transshipment(const Polymatroid& p, const Rational& d, const LoadVector& x,
                            const LoadVector& y) {
  if (!is_in_base(p, d, x) || !is_in_base(p, d, y)) {
    throw InputError("transshipment endpoints must lie in the base polytope");
  }
  Transshipment t;
  for (int e = 0; e < p.ground_size(); ++e) {
    if (x[e] > y[e]) t.sources.push_back(e);
    if (y[e] > x[e]) t.sinks.push_back(e);
  }
  const int ns = static_cast<int>(t.sources.size());
  const int nt = static_cast<int>(t.sinks.size());
  t.flow.assign(ns, std::vector<Rational>(nt));
  t.capacity.assign(ns, std::vector<Rational>(nt));
  if (ns == 0) return t;

  std::vector<Rational> supply(ns), want(nt);
  BigInt scale = 1;
  for (int s = 0; s < ns; ++s) {
    supply[s] = x[t.sources[s]] - y[t.sources[s]];
    scale = boost::multiprecision::lcm(scale, supply[s].denominator());
  }
  for (int q = 0; q < nt; ++q) {
    want[q] = y[t.sinks[q]] - x[t.sinks[q]];
    scale = boost::multiprecision::lcm(scale, want[q].denominator());
  }
  for (int s = 0; s < ns; ++s) {
    for (int q = 0; q < nt; ++q) {
      // Capacity for moving load off source s onto sink q, measured at x.
      t.capacity[s][q] = exchange_capacity(p, d, x, t.sinks[q], t.sources[s]);
      scale = boost::multiprecision::lcm(scale, t.capacity[s][q].denominator());
    }
  }

  auto scaled = [&scale](const Rational& r) -> BigInt {
    return r.numerator() * (scale / r.denominator());
  };
  const int source_node = 0;
  const int sink_node = ns + nt + 1;
  ExactMaxFlow net(ns + nt + 2);
  BigInt total_supply = 0;
  for (int s = 0; s < ns; ++s) {
    net.add(source_node, 1 + s, scaled(supply[s]));
    total_supply += scaled(supply[s]);
  }
  for (int q = 0; q < nt; ++q) net.add(1 + ns + q, sink_node, scaled(want[q]));
  for (int s = 0; s < ns; ++s) {
    for (int q = 0; q < nt; ++q) net.add(1 + s, 1 + ns + q, scaled(t.capacity[s][q]));
  }
  BigInt pushed = net.run(source_node, sink_node);
  if (pushed != total_supply) {
    throw InternalError("transshipment infeasible; rank oracle inconsistent");
  }
  for (int s = 0; s < ns; ++s) {
    for (int q = 0; q < nt; ++q) {
      BigInt routed = scaled(t.capacity[s][q]) - net.residual(1 + s, 1 + ns + q);
      t.flow[s][q] = Rational(routed, scale);
    }
  }
  return t;
}

std::pair<double, double> gradient_decomposition(const Game& g, const Profile& x, int i,
                                                 const LoadVector& y) {
  if (i < 0 || i >= g.num_players()) throw InputError("player index out of range");
  if (!x.integral_mode()) {
    throw InputError("gradient_decomposition needs exact loads (integral profile)");
  }
  if (static_cast<int>(y.size()) != g.num_resources()) {
    throw InputError("deviation vector size does not match resource count");
  }
  const int m = g.num_resources();
  std::vector<double> mu(m);
  for (int e = 0; e < m; ++e) mu[e] = marginal(g, x, i, e);

  double lhs = 0.0;
  for (int e = 0; e < m; ++e) lhs += mu[e] * (y[e].to_double() - x.load(i, e));

  Transshipment t = transshipment(g.strategy_space(i), g.demand(i), x.exact_loads(i), y);
  double rhs = 0.0;
  for (std::size_t s = 0; s < t.sources.size(); ++s) {
    for (std::size_t q = 0; q < t.sinks.size(); ++q) {
      rhs += (mu[t.sinks[q]] - mu[t.sources[s]]) * t.flow[s][q].to_double();
    }
  }
  if (std::abs(lhs - rhs) > 1e-9) {
    throw InternalError("gradient routes disagree: " + std::to_string(lhs) + " vs " +
                        std::to_string(rhs));
  }
  return {lhs, rhs};
}

}  // namespace congsolve

#pragma once

#include <utility>
#include <vector>

#include "congsolve/game.hpp"

namespace congsolve {

// Per-player certificate: how much each player could still gain by moving to
// her continuous best response. A profile carrying this certificate is
// (max_gap + n*tol)-approximate.
struct GapCertificate {
  struct Entry {
    double gap = 0.0;                // cost(x) - cost(best response), >= 0
    std::vector<double> witness;     // the best response that realizes it
  };
  std::vector<Entry> players;
  double max_gap = 0.0;
  double tol = 0.0;
};

// Conditional-gradient minimization of player i's cost over her base
// polytope, opponents frozen at x. Linear subproblems use the greedy vertex
// oracle; the segment step is an exact bisection line search. Returns a point
// within tol of the optimal deviation cost (duality-gap stopping rule).
std::vector<double> continuous_best_response(const Game& g, int player, const Profile& x,
                                             double tol);

// Gap certificate for every player; negative measurement noise within tol is
// clamped to zero.
GapCertificate epsilon_gap(const Game& g, const Profile& x, double tol);

// Feasible bipartite flow moving the surplus of x over y (sources) onto the
// deficit (sinks), respecting pairwise exchange capacities at x. Flows are
// exact rationals.
struct Transshipment {
  std::vector<int> sources;  // resources with x > y
  std::vector<int> sinks;    // resources with y > x
  std::vector<std::vector<Rational>> flow;      // [source][sink]
  std::vector<std::vector<Rational>> capacity;  // [source][sink]
};

Transshipment transshipment(const Polymatroid& p, const Rational& d, const LoadVector& x,
                            const LoadVector& y);

// Two routes to the same directional derivative of player i's cost toward
// y: straight from marginals, and re-expressed through the transshipment
// flows. The pair (lhs, rhs) agrees within numerical noise.
std::pair<double, double> gradient_decomposition(const Game& g, const Profile& x, int i,
                                                 const LoadVector& y);

}  // namespace congsolve

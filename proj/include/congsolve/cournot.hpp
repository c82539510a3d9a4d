#pragma once

#include <string>
#include <vector>

#include "congsolve/integral_solver.hpp"

namespace congsolve {

// Non-increasing, concave, differentiable inverse demand with a positive
// root, either a - b*t (affine) or a - b*t - c*t^2 (concave quadratic).
class PriceFunction {
 public:
  static PriceFunction affine(double a, double b);
  static PriceFunction concave_quadratic(double a, double b, double c);

  double operator()(double t) const { return a_ - (b_ + c_ * t) * t; }
  double derivative(double t) const { return -(b_ + 2.0 * c_ * t); }
  double intercept() const { return a_; }
  double linear_coef() const { return b_; }
  double quadratic_coef() const { return c_; }

  // Bound on |p'| and |p''| over [0, limit].
  double lipschitz_on(double limit) const {
    return std::max(b_ + 2.0 * c_ * limit, 2.0 * c_);
  }

  double root() const;  // positive zero of p, binary64 approximation
  // Smallest multiple of 1/4 at or past the root, decided by exact sign
  // evaluation of p at rational points.
  Rational root_ceil_quarter() const;

 private:
  PriceFunction(double a, double b, double c) : a_(a), b_(b), c_(c) {}

  double a_ = 0.0;
  double b_ = 0.0;
  double c_ = 0.0;
};

struct Firm {
  std::vector<int> markets;           // accessible market indices
  double production_cost_coef = 0.0;  // C_i(t) = coef * t^2
  std::vector<PriceFunction> prices;  // aligned with `markets`
};

// Firms selling on (subsets of) shared markets; utility is revenue minus
// quadratic production cost.
class Oligopoly {
 public:
  Oligopoly(std::vector<std::string> market_names, std::vector<Firm> firms);

  int num_firms() const { return static_cast<int>(firms_.size()); }
  int num_markets() const { return static_cast<int>(market_names_.size()); }
  const std::vector<std::string>& market_names() const { return market_names_; }
  const Firm& firm(int i) const { return firms_[i]; }
  bool accessible(int firm, int market) const;
  const PriceFunction& price(int firm, int market) const;

 private:
  std::vector<std::string> market_names_;
  std::vector<Firm> firms_;
};

// Utility of every firm at the quantity matrix [firm][market]; production on
// an inaccessible market is an input error.
std::vector<double> firm_utility(const Oligopoly& o, const std::vector<std::vector<double>>& q);

// Strategy bijection data for the congestion-game reduction: each firm gets a
// private slack resource absorbing unused capacity, and utilities transfer to
// costs up to the per-firm constant `shift`.
struct IsomorphismMap {
  struct FirmMap {
    int slack_resource = 0;
    std::vector<int> markets;  // the firm's accessible markets
    Rational demand;
    double shift = 0.0;  // u_i(q) + pi_i(map(q)) at every profile
  };
  std::vector<FirmMap> firms;
  int num_markets = 0;
  double cost_constant = 0.0;  // C added to every cost to keep them nonnegative
};

// Equivalent congestion game: markets plus one slack resource per firm,
// simplex strategy spaces of rank d_i, costs C - p on markets and
// C + c_i*(t - 2 d_i) on the slack.
std::pair<Game, IsomorphismMap> to_congestion_game(const Oligopoly& o);

std::vector<double> map_strategy(const IsomorphismMap& map, int firm,
                                 const std::vector<double>& quantities);
std::vector<double> unmap_strategy(const IsomorphismMap& map, int firm,
                                   const std::vector<double>& loads);
LoadVector map_strategy_exact(const IsomorphismMap& map, int firm, const LoadVector& quantities);
LoadVector unmap_strategy_exact(const IsomorphismMap& map, int firm, const LoadVector& loads);

struct CournotSolution {
  std::vector<LoadVector> quantities;  // [firm][market], exact rationals
  GapCertificate certificate;          // gaps bound utility improvements; witnesses in quantities
  EquilibriumResult equilibrium;
  PacketSchedule schedule;
};

// Build the congestion game, solve it epsilon-approximately, map back.
CournotSolution solve_cournot(const Oligopoly& o, double epsilon);

}  // namespace congsolve

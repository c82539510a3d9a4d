#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congsolve/cost.hpp"
#include "congsolve/polymatroid.hpp"
#include "congsolve/rational.hpp"

namespace congsolve {

struct PlayerSpec {
  Rational demand;
  Polymatroid strategy_space;
};

// Splittable congestion game: each player routes an exact rational demand
// inside her polymatroid base polytope; per-(player,resource) polynomial
// costs are charged on the aggregate load.
class Game {
 public:
  Game(std::vector<std::string> resource_names, std::vector<PlayerSpec> players,
       std::vector<std::vector<CostFunction>> costs);

  int num_players() const { return static_cast<int>(players_.size()); }
  int num_resources() const { return static_cast<int>(resource_names_.size()); }
  const std::vector<std::string>& resource_names() const { return resource_names_; }
  const Rational& demand(int i) const { return players_[i].demand; }
  const Polymatroid& strategy_space(int i) const { return players_[i].strategy_space; }
  const CostFunction& cost(int i, int e) const { return costs_[i][e]; }

  Rational max_demand() const;    // delta
  Rational total_demand() const;  // sum of demands

 private:
  std::vector<std::string> resource_names_;
  std::vector<PlayerSpec> players_;
  std::vector<std::vector<CostFunction>> costs_;
};

// One constant bounding |c| and |c'| variation for every cost function on
// every aggregate load the solver can produce (loads live in
// [0, total_demand + 1]).
double game_lipschitz(const Game& g);

// Strategy profile. Integral mode stores exact packet counts per
// (player, resource) together with the packet size k; continuous mode stores
// binary64 loads. Values are immutable after construction.
class Profile {
 public:
  Profile() = default;  // empty profile

  static Profile integral(const Rational& k, std::vector<std::vector<std::int64_t>> counts);
  static Profile continuous(std::vector<std::vector<double>> loads);
  static Profile zeros(const Game& g, const Rational& k);

  bool integral_mode() const { return integral_; }
  const Rational& packet() const;
  double packet_real() const { return kd_; }

  int num_players() const { return n_; }
  int num_resources() const { return m_; }

  std::int64_t count(int i, int e) const;
  std::int64_t total_count(int e) const;
  double load(int i, int e) const;
  double total_load(int e) const;
  Rational exact_load(int i, int e) const;
  LoadVector exact_loads(int i) const;
  std::vector<double> loads(int i) const;

 private:
  bool integral_ = false;
  int n_ = 0;
  int m_ = 0;
  Rational k_;
  double kd_ = 0.0;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> total_counts_;
  std::vector<std::vector<double>> loads_;
  std::vector<double> total_loads_;
};

namespace detail {

// Shared marginal-cost kernels; the packet solver evaluates the same double
// expressions so results agree bit for bit with the public operations.
inline double marginal_at(const CostFunction& c, double aggregate, double own) {
  return c(aggregate) + own * c.derivative(aggregate);
}
inline double marginal_up(const CostFunction& c, double aggregate, double own, double k) {
  return (own + k) * c(aggregate + k) - own * c(aggregate);
}
inline double marginal_down(const CostFunction& c, double aggregate, double own, double k) {
  return own * c(aggregate) - (own - k) * c(aggregate - k);
}

}  // namespace detail

// Total cost of player i: sum over resources of cost(aggregate) * own load.
double player_cost(const Game& g, const Profile& x, int i);

// Cost of player i after unilaterally replacing her loads with y.
double deviation_cost(const Game& g, const Profile& x, int i, std::span<const double> y);

// Continuous marginal cost c(x_e) + x_{i,e} c'(x_e).
double marginal(const Game& g, const Profile& x, int i, int e);

// Cost increase from adding one packet of size k on e.
double marginal_up(const Game& g, const Profile& x, int i, int e, double k);

// Gain from removing one packet of size k from e; empty when the player has
// no load there (the "minus infinity" case, which compares below every real).
std::optional<double> marginal_down(const Game& g, const Profile& x, int i, int e, double k);

// Exact feasibility of every player's strategy (integral mode); continuous
// profiles are checked per constraint within tol.
bool profile_feasible(const Game& g, const Profile& x, double tol = 1e-9);

}  // namespace congsolve

#include "congsolve/game.hpp"

#include <cmath>

namespace congsolve {

namespace {

void check_player(const Game& g, int i) {
  if (i < 0 || i >= g.num_players()) throw InputError("player index out of range");
}

void check_resource(const Game& g, int e) {
  if (e < 0 || e >= g.num_resources()) throw InputError("resource index out of range");
}

void check_shape(const Game& g, const Profile& x) {
  if (x.num_players() != g.num_players() || x.num_resources() != g.num_resources()) {
    throw InputError("profile shape does not match game");
  }
}

}  // namespace

Game::Game(std::vector<std::string> resource_names, std::vector<PlayerSpec> players,
           std::vector<std::vector<CostFunction>> costs)
    : resource_names_(std::move(resource_names)),
      players_(std::move(players)),
      costs_(std::move(costs)) {
  const int m = num_resources();
  if (costs_.size() != players_.size()) {
    throw InputError("cost table must have one row per player");
  }
  for (const auto& row : costs_) {
    if (static_cast<int>(row.size()) != m) {
      throw InputError("cost table row size does not match resource count");
    }
  }
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const PlayerSpec& p = players_[i];
    if (p.strategy_space.ground_size() != m) {
      throw InputError("player " + std::to_string(i) +
                       ": polymatroid ground set does not match resource count");
    }
    if (p.demand.is_negative()) {
      throw InputError("player " + std::to_string(i) + ": negative demand");
    }
    if (auto v = p.strategy_space.validate()) {
      throw InputError("player " + std::to_string(i) + ": rank oracle violates the " +
                       v->axiom + " axiom");
    }
    if (p.demand > p.strategy_space.rank_ground()) {
      throw InfeasibleError("player " + std::to_string(i) +
                            ": demand exceeds the rank of the ground set");
    }
  }
}

Rational Game::max_demand() const {
  Rational delta;
  for (const PlayerSpec& p : players_) {
    if (p.demand > delta) delta = p.demand;
  }
  return delta;
}

Rational Game::total_demand() const {
  Rational total;
  for (const PlayerSpec& p : players_) total += p.demand;
  return total;
}

double game_lipschitz(const Game& g) {
  double limit = g.total_demand().to_double() + 1.0;
  double lip = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    for (int e = 0; e < g.num_resources(); ++e) {
      lip = std::max(lip, g.cost(i, e).lipschitz_on(limit));
    }
  }
  return lip;
}

Profile Profile::integral(const Rational& k, std::vector<std::vector<std::int64_t>> counts) {
  if (!k.is_positive()) throw InputError("packet size must be positive");
  Profile p;
  p.integral_ = true;
  p.k_ = k;
  p.kd_ = k.to_double();
  p.counts_ = std::move(counts);
  p.n_ = static_cast<int>(p.counts_.size());
  p.m_ = p.n_ > 0 ? static_cast<int>(p.counts_[0].size()) : 0;
  p.total_counts_.assign(p.m_, 0);
  for (const auto& row : p.counts_) {
    if (static_cast<int>(row.size()) != p.m_) {
      throw InputError("ragged packet-count matrix");
    }
    for (int e = 0; e < p.m_; ++e) {
      if (row[e] < 0) throw InputError("negative packet count");
      p.total_counts_[e] += row[e];
    }
  }
  return p;
}

Profile Profile::continuous(std::vector<std::vector<double>> loads) {
  Profile p;
  p.integral_ = false;
  p.loads_ = std::move(loads);
  p.n_ = static_cast<int>(p.loads_.size());
  p.m_ = p.n_ > 0 ? static_cast<int>(p.loads_[0].size()) : 0;
  p.total_loads_.assign(p.m_, 0.0);
  for (const auto& row : p.loads_) {
    if (static_cast<int>(row.size()) != p.m_) {
      throw InputError("ragged load matrix");
    }
    for (int e = 0; e < p.m_; ++e) {
      if (!std::isfinite(row[e])) throw InputError("non-finite load");
      p.total_loads_[e] += row[e];
    }
  }
  return p;
}

Profile Profile::zeros(const Game& g, const Rational& k) {
  return integral(k, std::vector<std::vector<std::int64_t>>(
                         g.num_players(), std::vector<std::int64_t>(g.num_resources(), 0)));
}

const Rational& Profile::packet() const {
  if (!integral_) throw InputError("continuous profile has no packet size");
  return k_;
}

std::int64_t Profile::count(int i, int e) const {
  if (!integral_) throw InputError("continuous profile has no packet counts");
  return counts_[i][e];
}

std::int64_t Profile::total_count(int e) const {
  if (!integral_) throw InputError("continuous profile has no packet counts");
  return total_counts_[e];
}

double Profile::load(int i, int e) const {
  return integral_ ? static_cast<double>(counts_[i][e]) * kd_ : loads_[i][e];
}

double Profile::total_load(int e) const {
  return integral_ ? static_cast<double>(total_counts_[e]) * kd_ : total_loads_[e];
}

Rational Profile::exact_load(int i, int e) const {
  if (!integral_) throw InputError("continuous profile has no exact loads");
  return Rational(counts_[i][e]) * k_;
}

LoadVector Profile::exact_loads(int i) const {
  LoadVector v(m_);
  for (int e = 0; e < m_; ++e) v[e] = exact_load(i, e);
  return v;
}

std::vector<double> Profile::loads(int i) const {
  std::vector<double> v(m_);
  for (int e = 0; e < m_; ++e) v[e] = load(i, e);
  return v;
}

double player_cost(const Game& g, const Profile& x, int i) {
  check_shape(g, x);
  check_player(g, i);
  double total = 0.0;
  for (int e = 0; e < g.num_resources(); ++e) {
    double own = x.load(i, e);
    if (own != 0.0) total += g.cost(i, e)(x.total_load(e)) * own;
  }
  return total;
}

double deviation_cost(const Game& g, const Profile& x, int i, std::span<const double> y) {
  check_shape(g, x);
  check_player(g, i);
  if (static_cast<int>(y.size()) != g.num_resources()) {
    throw InputError("deviation vector size does not match resource count");
  }
  double total = 0.0;
  for (int e = 0; e < g.num_resources(); ++e) {
    if (y[e] != 0.0) {
      double aggregate = x.total_load(e) - x.load(i, e) + y[e];
      total += g.cost(i, e)(aggregate) * y[e];
    }
  }
  return total;
}

double marginal(const Game& g, const Profile& x, int i, int e) {
  check_shape(g, x);
  check_player(g, i);
  check_resource(g, e);
  return detail::marginal_at(g.cost(i, e), x.total_load(e), x.load(i, e));
}

double marginal_up(const Game& g, const Profile& x, int i, int e, double k) {
  check_shape(g, x);
  check_player(g, i);
  check_resource(g, e);
  if (!(k > 0.0)) throw InputError("packet size must be positive");
  return detail::marginal_up(g.cost(i, e), x.total_load(e), x.load(i, e), k);
}

std::optional<double> marginal_down(const Game& g, const Profile& x, int i, int e, double k) {
  check_shape(g, x);
  check_player(g, i);
  check_resource(g, e);
  if (!(k > 0.0)) throw InputError("packet size must be positive");
  if (x.load(i, e) <= 0.0) return std::nullopt;
  return detail::marginal_down(g.cost(i, e), x.total_load(e), x.load(i, e), k);
}

bool profile_feasible(const Game& g, const Profile& x, double tol) {
  check_shape(g, x);
  for (int i = 0; i < g.num_players(); ++i) {
    if (x.integral_mode()) {
      if (!is_in_base(g.strategy_space(i), g.demand(i), x.exact_loads(i))) return false;
    } else {
      std::vector<double> own = x.loads(i);
      if (!is_in_base_within(g.strategy_space(i), g.demand(i), own, tol)) return false;
    }
  }
  return true;
}

}  // namespace congsolve

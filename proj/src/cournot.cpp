#include "congsolve/cournot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace congsolve {

PriceFunction PriceFunction::affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
    throw InputError("affine price needs a > 0 and b > 0");
  }
  return PriceFunction(a, b, 0.0);
}

PriceFunction PriceFunction::concave_quadratic(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || a <= 0.0 || b < 0.0 ||
      c < 0.0 || (b == 0.0 && c == 0.0)) {
    throw InputError("quadratic price needs a > 0, b >= 0, c >= 0 and (b,c) != (0,0)");
  }
  return PriceFunction(a, b, c);
}

double PriceFunction::root() const {
  if (c_ == 0.0) return a_ / b_;
  return (-b_ + std::sqrt(b_ * b_ + 4.0 * c_ * a_)) / (2.0 * c_);
}

Rational PriceFunction::root_ceil_quarter() const {
  Rational ra = Rational::from_double(a_);
  Rational rb = Rational::from_double(b_);
  Rational rc = Rational::from_double(c_);
  auto price_at = [&](const Rational& t) { return ra - rb * t - rc * t * t; };
  BigInt q = Rational::from_double(root() * 4.0).floor() - 2;
  if (q < 1) q = 1;
  while (price_at(Rational(q, BigInt(4))).is_positive()) {
    q += 1;  // p is strictly decreasing past 0, so this stops
  }
  return Rational(q, BigInt(4));
}

Oligopoly::Oligopoly(std::vector<std::string> market_names, std::vector<Firm> firms)
    : market_names_(std::move(market_names)), firms_(std::move(firms)) {
  const int m = num_markets();
  for (std::size_t i = 0; i < firms_.size(); ++i) {
    const Firm& f = firms_[i];
    if (f.markets.empty()) {
      throw InputError("firm " + std::to_string(i) + " has no accessible market");
    }
    if (f.markets.size() != f.prices.size()) {
      throw InputError("firm " + std::to_string(i) + ": one price per accessible market");
    }
    if (!std::isfinite(f.production_cost_coef) || f.production_cost_coef < 0.0) {
      throw InputError("firm " + std::to_string(i) + ": production cost must be >= 0");
    }
    std::vector<bool> seen(m, false);
    for (int e : f.markets) {
      if (e < 0 || e >= m) {
        throw InputError("firm " + std::to_string(i) + ": market index out of range");
      }
      if (seen[e]) {
        throw InputError("firm " + std::to_string(i) + ": duplicate market");
      }
      seen[e] = true;
    }
  }
}

bool Oligopoly::accessible(int firm, int market) const {
  const auto& ms = firms_[firm].markets;
  return std::find(ms.begin(), ms.end(), market) != ms.end();
}

const PriceFunction& Oligopoly::price(int firm, int market) const {
  const auto& ms = firms_[firm].markets;
  auto it = std::find(ms.begin(), ms.end(), market);
  if (it == ms.end()) {
    throw InputError("firm " + std::to_string(firm) + " cannot sell on market " +
                     std::to_string(market));
  }
  return firms_[firm].prices[it - ms.begin()];
}

std::vector<double> firm_utility(const Oligopoly& o, const std::vector<std::vector<double>>& q) {
  if (static_cast<int>(q.size()) != o.num_firms()) {
    throw InputError("quantity matrix must have one row per firm");
  }
  std::vector<double> market_total(o.num_markets(), 0.0);
  for (int i = 0; i < o.num_firms(); ++i) {
    if (static_cast<int>(q[i].size()) != o.num_markets()) {
      throw InputError("quantity row size does not match market count");
    }
    for (int e = 0; e < o.num_markets(); ++e) {
      if (q[i][e] < 0.0) throw InputError("negative production quantity");
      if (q[i][e] > 0.0 && !o.accessible(i, e)) {
        throw InputError("firm " + std::to_string(i) + " produces on inaccessible market " +
                         std::to_string(e));
      }
      market_total[e] += q[i][e];
    }
  }
  std::vector<double> utility(o.num_firms(), 0.0);
  for (int i = 0; i < o.num_firms(); ++i) {
    double produced = 0.0;
    for (int e : o.firm(i).markets) {
      utility[i] += o.price(i, e)(market_total[e]) * q[i][e];
      produced += q[i][e];
    }
    utility[i] -= o.firm(i).production_cost_coef * produced * produced;
  }
  return utility;
}

std::pair<Game, IsomorphismMap> to_congestion_game(const Oligopoly& o) {
  const int m0 = o.num_markets();
  const int n = o.num_firms();
  const int m = m0 + n;  // markets plus one slack resource per firm
  if (m > 63) throw InputError("too many markets and firms for the reduction");

  IsomorphismMap map;
  map.num_markets = m0;
  map.firms.resize(n);

  std::vector<Rational> demand(n);
  double cost_constant = 0.0;
  for (int i = 0; i < n; ++i) {
    const Firm& f = o.firm(i);
    Rational d;
    for (std::size_t j = 0; j < f.markets.size(); ++j) {
      d += f.prices[j].root_ceil_quarter();
      cost_constant = std::max(cost_constant, f.prices[j].intercept());
    }
    demand[i] = d;
    cost_constant = std::max(cost_constant, 2.0 * f.production_cost_coef * d.to_double());
  }
  map.cost_constant = cost_constant;

  std::vector<std::string> resource_names(o.market_names().begin(), o.market_names().end());
  for (int i = 0; i < n; ++i) resource_names.push_back("slack:" + std::to_string(i));

  std::vector<PlayerSpec> players(n);
  std::vector<std::vector<CostFunction>> costs(n, std::vector<CostFunction>(m));
  for (int i = 0; i < n; ++i) {
    const Firm& f = o.firm(i);
    const int slack = m0 + i;
    Subset allowed = Subset{1} << slack;
    for (std::size_t j = 0; j < f.markets.size(); ++j) {
      allowed |= Subset{1} << f.markets[j];
      const PriceFunction& p = f.prices[j];
      costs[i][f.markets[j]] = CostFunction(
          {cost_constant - p.intercept(), p.linear_coef(), p.quadratic_coef()});
    }
    double ci = f.production_cost_coef;
    costs[i][slack] =
        CostFunction({cost_constant - 2.0 * ci * demand[i].to_double(), ci});
    players[i] = PlayerSpec{demand[i], Polymatroid::simplex(m, allowed, demand[i])};
    map.firms[i].slack_resource = slack;
    map.firms[i].markets = f.markets;
    map.firms[i].demand = demand[i];
  }
  Game game(std::move(resource_names), std::move(players), std::move(costs));

  // The additive constant is measured, not hard-coded: utility plus mapped
  // cost is profile-independent, so the zero profile determines it.
  std::vector<std::vector<double>> zero_loads(n, std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) {
    zero_loads[i][map.firms[i].slack_resource] = map.firms[i].demand.to_double();
  }
  Profile mapped_zero = Profile::continuous(zero_loads);
  for (int i = 0; i < n; ++i) {
    map.firms[i].shift = player_cost(game, mapped_zero, i);  // u_i(0) = 0
  }
  return {std::move(game), std::move(map)};
}

namespace {

template <typename Vec, typename Scalar>
Vec map_strategy_impl(const IsomorphismMap& map, int firm, const Vec& quantities) {
  if (firm < 0 || firm >= static_cast<int>(map.firms.size())) {
    throw InputError("firm index out of range");
  }
  if (static_cast<int>(quantities.size()) != map.num_markets) {
    throw InputError("quantity vector size does not match market count");
  }
  const auto& fm = map.firms[firm];
  Vec loads(map.num_markets + map.firms.size());
  Scalar produced{};
  for (int e = 0; e < map.num_markets; ++e) {
    bool mine = std::find(fm.markets.begin(), fm.markets.end(), e) != fm.markets.end();
    if (quantities[e] < Scalar{} || (!mine && !(quantities[e] == Scalar{}))) {
      throw InputError("quantities must be nonnegative and restricted to the firm's markets");
    }
    loads[e] = quantities[e];
    produced += quantities[e];
  }
  Scalar demand_value;
  if constexpr (std::is_same_v<Scalar, double>) {
    demand_value = fm.demand.to_double();
    if (produced > demand_value + 1e-12) {
      throw InputError("total quantity exceeds the firm's demand cap");
    }
  } else {
    demand_value = fm.demand;
    if (produced > demand_value) {
      throw InputError("total quantity exceeds the firm's demand cap");
    }
  }
  loads[fm.slack_resource] = demand_value - produced;
  return loads;
}

template <typename Vec>
Vec unmap_strategy_impl(const IsomorphismMap& map, int firm, const Vec& loads) {
  if (firm < 0 || firm >= static_cast<int>(map.firms.size())) {
    throw InputError("firm index out of range");
  }
  if (loads.size() != static_cast<std::size_t>(map.num_markets) + map.firms.size()) {
    throw InputError("load vector size does not match the reduced game");
  }
  return Vec(loads.begin(), loads.begin() + map.num_markets);
}

}  // namespace

std::vector<double> map_strategy(const IsomorphismMap& map, int firm,
                                 const std::vector<double>& quantities) {
  return map_strategy_impl<std::vector<double>, double>(map, firm, quantities);
}

std::vector<double> unmap_strategy(const IsomorphismMap& map, int firm,
                                   const std::vector<double>& loads) {
  return unmap_strategy_impl(map, firm, loads);
}

LoadVector map_strategy_exact(const IsomorphismMap& map, int firm, const LoadVector& quantities) {
  return map_strategy_impl<LoadVector, Rational>(map, firm, quantities);
}

LoadVector unmap_strategy_exact(const IsomorphismMap& map, int firm, const LoadVector& loads) {
  return unmap_strategy_impl(map, firm, loads);
}

CournotSolution solve_cournot(const Oligopoly& o, double epsilon) {
  auto [game, map] = to_congestion_game(o);
  ApproxResult base = solve_approx(game, epsilon);

  CournotSolution sol;
  sol.equilibrium = std::move(base.equilibrium);
  sol.schedule = std::move(base.schedule);
  sol.quantities.resize(o.num_firms());
  for (int i = 0; i < o.num_firms(); ++i) {
    sol.quantities[i] = unmap_strategy_exact(map, i, sol.equilibrium.profile.exact_loads(i));
  }
  // Cost gaps are utility gaps (the additive constants cancel); map the
  // witnesses back to quantity space.
  sol.certificate = std::move(base.certificate);
  for (int i = 0; i < o.num_firms(); ++i) {
    sol.certificate.players[i].witness =
        unmap_strategy(map, i, sol.certificate.players[i].witness);
  }
  return sol;
}

}  // namespace congsolve

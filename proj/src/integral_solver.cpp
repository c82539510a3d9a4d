#include "congsolve/integral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace congsolve {

namespace {

constexpr std::int64_t kIterationCapFactor = 16;

std::int64_t exact_packet_quotient(const Rational& value, const Rational& k, const char* what) {
  Rational q = value / k;
  if (!q.is_integer() || q.is_negative()) {
    throw InputError(std::string(what) + " is not a nonnegative multiple of the packet size");
  }
  const BigInt& n = q.numerator();
  if (n > std::numeric_limits<std::int64_t>::max()) {
    throw InputError(std::string(what) + ": packet count overflows");
  }
  return n.convert_to<std::int64_t>();
}

// Solver state in packet units: all feasibility data divided by k is
// integral, so membership and exchange checks are integer comparisons.
class PacketState {
 public:
  PacketState(const Game& g, const Rational& k) : g_(g), k_(k), kd_(k.to_double()) {
    n_ = g.num_players();
    m_ = g.num_resources();
    counts_.assign(n_, std::vector<std::int64_t>(m_, 0));
    totals_.assign(m_, 0);
    own_totals_.assign(n_, 0);
    targets_.resize(n_);
    simplex_.assign(n_, false);
    allowed_.assign(n_, 0);
    simplex_rank_.assign(n_, 0);
    slack_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      targets_[i] = exact_packet_quotient(g.demand(i), k, "player demand");
      const Polymatroid& p = g.strategy_space(i);
      if (p.is_simplex()) {
        simplex_[i] = true;
        allowed_[i] = p.allowed_mask();
        simplex_rank_[i] = exact_packet_quotient(p.simplex_rank(), k, "rank value");
      } else {
        Subset full = p.full_mask();
        slack_[i].resize(full + 1);
        slack_[i][0] = 0;
        for (Subset u = 1; u <= full; ++u) {
          slack_[i][u] = exact_packet_quotient(p.rank(u), k, "rank value");
        }
      }
    }
  }

  int players() const { return n_; }
  int resources() const { return m_; }
  std::int64_t target(int i) const { return targets_[i]; }
  std::int64_t placed(int i) const { return own_totals_[i]; }
  const std::vector<std::vector<std::int64_t>>& counts() const { return counts_; }

  void load_counts(const std::vector<std::vector<std::int64_t>>& counts) {
    for (int i = 0; i < n_; ++i) {
      for (int e = 0; e < m_; ++e) {
        std::int64_t c = counts[i][e];
        for (std::int64_t step = 0; step < c; ++step) {
          if (!can_add(i, e)) {
            throw InputError("profile violates player " + std::to_string(i) +
                             "'s rank constraints");
          }
          add(i, e);
        }
      }
    }
  }

  bool can_add(int i, int e) const {
    if (simplex_[i]) {
      return (allowed_[i] & (Subset{1} << e)) != 0 && own_totals_[i] + 1 <= simplex_rank_[i];
    }
    const auto& slack = slack_[i];
    Subset full = (Subset{1} << m_) - 1;
    for (Subset u = Subset{1} << e; u <= full; ++u) {
      if ((u & (Subset{1} << e)) && slack[u] < 1) return false;
    }
    return true;
  }

  // Packets that can move from f onto e for player i.
  std::int64_t exchange_packets(int i, int e, int f) const {
    std::int64_t cap = counts_[i][f];
    if (cap == 0) return 0;
    if (simplex_[i]) {
      return (allowed_[i] & (Subset{1} << e)) != 0 ? cap : 0;
    }
    const auto& slack = slack_[i];
    Subset full = (Subset{1} << m_) - 1;
    for (Subset u = 1; u <= full; ++u) {
      if ((u & (Subset{1} << e)) && !(u & (Subset{1} << f))) {
        cap = std::min(cap, slack[u]);
        if (cap == 0) return 0;
      }
    }
    return cap;
  }

  void add(int i, int e) {
    counts_[i][e] += 1;
    totals_[e] += 1;
    own_totals_[i] += 1;
    if (!simplex_[i]) bump_slack(i, e, -1);
  }

  void move(int i, int to, int from) {
    counts_[i][to] += 1;
    counts_[i][from] -= 1;
    totals_[to] += 1;
    totals_[from] -= 1;
    if (!simplex_[i]) {
      bump_slack(i, to, -1);
      bump_slack(i, from, +1);
    }
  }

  double mu_up(int i, int e) const {
    double own = static_cast<double>(counts_[i][e]) * kd_;
    double aggregate = static_cast<double>(totals_[e]) * kd_;
    return detail::marginal_up(g_.cost(i, e), aggregate, own, kd_);
  }

  // Gain of removing a packet; meaningful only when the player holds one.
  double mu_down(int i, int e) const {
    double own = static_cast<double>(counts_[i][e]) * kd_;
    double aggregate = static_cast<double>(totals_[e]) * kd_;
    return detail::marginal_down(g_.cost(i, e), aggregate, own, kd_);
  }

  std::optional<LocalViolation> first_violation() const {
    for (int i = 0; i < n_; ++i) {
      for (int e = 0; e < m_; ++e) {
        for (int f = 0; f < m_; ++f) {
          if (f == e || counts_[i][f] == 0) continue;
          if (exchange_packets(i, e, f) < 1) continue;
          if (mu_up(i, e) < mu_down(i, f) - kMarginalDeadband) {
            return LocalViolation{i, e, f};
          }
        }
      }
    }
    return std::nullopt;
  }

  // Greedy placement target: feasible resource with the cheapest packet.
  int cheapest_feasible(int i) const {
    int best = -1;
    double best_cost = 0.0;
    for (int e = 0; e < m_; ++e) {
      if (!can_add(i, e)) continue;
      double c = mu_up(i, e);
      if (best < 0 || c < best_cost) {
        best = e;
        best_cost = c;
      }
    }
    return best;
  }

  Profile to_profile() const { return Profile::integral(k_, counts_); }

 private:
  void bump_slack(int i, int e, std::int64_t delta) {
    auto& slack = slack_[i];
    Subset full = (Subset{1} << m_) - 1;
    for (Subset u = Subset{1} << e; u <= full; ++u) {
      if (u & (Subset{1} << e)) slack[u] += delta;
    }
  }

  const Game& g_;
  Rational k_;
  double kd_;
  int n_ = 0;
  int m_ = 0;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> totals_;
  std::vector<std::int64_t> own_totals_;
  std::vector<std::int64_t> targets_;
  std::vector<bool> simplex_;
  std::vector<Subset> allowed_;
  std::vector<std::int64_t> simplex_rank_;
  std::vector<std::vector<std::int64_t>> slack_;
};

void check_profile_matches(const Game& g, const Rational& k, const Profile& x) {
  if (!x.integral_mode()) throw InputError("profile must be integral");
  if (x.packet() != k) throw InputError("profile packet size does not match k");
  if (x.num_players() != g.num_players() || x.num_resources() != g.num_resources()) {
    throw InputError("profile shape does not match game");
  }
}

}  // namespace

PacketSchedule packet_size(const Game& g, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  PacketSchedule s;
  s.epsilon = epsilon;
  s.lipschitz = game_lipschitz(g);
  s.delta = g.max_demand();
  s.num_resources = g.num_resources();

  std::vector<Rational> values;
  for (int i = 0; i < g.num_players(); ++i) {
    std::vector<Rational> rv = rank_values(g.strategy_space(i));
    values.insert(values.end(), rv.begin(), rv.end());
    values.push_back(g.demand(i));
  }
  s.rho_gcd_value = rho_gcd(values);

  // Round the Lipschitz constant up to an exact rational before the exact
  // ceiling; a slightly larger divisor only shrinks k.
  Rational lip_up = Rational((Rational::from_double(s.lipschitz) * Rational(1000000)).ceil(),
                             BigInt(1000000));
  Rational m2(static_cast<long long>(g.num_resources()) *
              static_cast<long long>(g.num_resources()));
  Rational product = Rational(2) * m2 * lip_up * s.delta * (s.delta + Rational(1));
  if (product.is_zero()) {
    s.divisor = 1;  // degenerate: zero demands or flat costs
    s.k = s.rho_gcd_value;
    return s;
  }
  s.divisor = (product / Rational::from_double(epsilon)).ceil();
  s.k = s.rho_gcd_value / Rational(s.divisor);

  for (int i = 0; i < g.num_players(); ++i) {
    exact_packet_quotient(g.demand(i), s.k, "player demand");
    for (const Rational& v : rank_values(g.strategy_space(i))) {
      exact_packet_quotient(v, s.k, "rank value");
    }
  }
  return s;
}

LoadVector best_response_k(const Game& g, const Rational& k, int player, const Profile& others) {
  if (player < 0 || player >= g.num_players()) throw InputError("player index out of range");
  check_profile_matches(g, k, others);
  PacketState state(g, k);
  std::vector<std::vector<std::int64_t>> counts(
      g.num_players(), std::vector<std::int64_t>(g.num_resources(), 0));
  for (int i = 0; i < g.num_players(); ++i) {
    if (i == player) continue;  // the player's own loads are rebuilt from scratch
    for (int e = 0; e < g.num_resources(); ++e) counts[i][e] = others.count(i, e);
  }
  state.load_counts(counts);

  const std::int64_t target = state.target(player);
  for (std::int64_t packet = 0; packet < target; ++packet) {
    int e = state.cheapest_feasible(player);
    if (e < 0) throw InternalError("no feasible packet placement");
    state.add(player, e);
  }

  // Exchange repair: apply the largest-gain feasible single-packet move.
  const std::int64_t cap = kIterationCapFactor * (target + 1) *
                           static_cast<std::int64_t>(g.num_resources()) *
                           static_cast<std::int64_t>(g.num_resources());
  for (std::int64_t iter = 0; iter <= cap; ++iter) {
    int best_e = -1, best_f = -1;
    double best_gain = kMarginalDeadband;
    for (int e = 0; e < g.num_resources(); ++e) {
      for (int f = 0; f < g.num_resources(); ++f) {
        if (f == e || state.exchange_packets(player, e, f) < 1) continue;
        double gain = state.mu_down(player, f) - state.mu_up(player, e);
        if (gain > best_gain) {
          best_gain = gain;
          best_e = e;
          best_f = f;
        }
      }
    }
    if (best_e < 0) {
      LoadVector result(g.num_resources());
      for (int e = 0; e < g.num_resources(); ++e) {
        result[e] = Rational(state.counts()[player][e]) * k;
      }
      return result;
    }
    state.move(player, best_e, best_f);
  }
  throw NonTerminationError("best response exchange repair exceeded its iteration cap",
                            state.to_profile());
}

std::optional<LocalViolation> local_violation(const Game& g, const Rational& k,
                                              const Profile& x) {
  check_profile_matches(g, k, x);
  PacketState state(g, k);
  std::vector<std::vector<std::int64_t>> counts(
      g.num_players(), std::vector<std::int64_t>(g.num_resources(), 0));
  for (int i = 0; i < g.num_players(); ++i) {
    for (int e = 0; e < g.num_resources(); ++e) counts[i][e] = x.count(i, e);
  }
  state.load_counts(counts);
  for (int i = 0; i < g.num_players(); ++i) {
    if (state.placed(i) != state.target(i)) {
      throw InputError("profile does not meet player " + std::to_string(i) + "'s demand");
    }
  }
  return state.first_violation();
}

EquilibriumResult solve_integral(const Game& g, const Rational& k, const SolveOptions& options) {
  PacketState state(g, k);
  EquilibriumResult result{Profile::zeros(g, k), k, 0, 0, false};

  BigInt total_packets = 0;
  for (int i = 0; i < g.num_players(); ++i) total_packets += state.target(i);
  BigInt cap_big = BigInt(kIterationCapFactor) * g.num_players() * g.num_resources() *
                   (total_packets + 1) * (total_packets + 1) * (total_packets + 1);
  const std::int64_t step_cap =
      cap_big > std::numeric_limits<std::int64_t>::max()
          ? std::numeric_limits<std::int64_t>::max()
          : cap_big.convert_to<std::int64_t>();

  std::int64_t steps = 0;
  auto emit = [&](TraceEvent::Kind kind, int player, int to, int from, double gain) {
    if (options.on_event) {
      options.on_event(TraceEvent{steps, kind, player, to, from, gain});
    }
  };

  for (int i = 0; i < g.num_players(); ++i) {
    while (state.placed(i) < state.target(i)) {
      int e = state.cheapest_feasible(i);
      if (e < 0) throw InternalError("no feasible packet placement");
      double placed_cost = state.mu_up(i, e);
      state.add(i, e);
      result.demand_increments += 1;
      ++steps;
      emit(TraceEvent::Kind::Place, i, e, -1, placed_cost);

      while (auto v = state.first_violation()) {
        double gain = state.mu_down(v->player, v->remove_from) - state.mu_up(v->player, v->add_to);
        state.move(v->player, v->add_to, v->remove_from);
        result.best_response_count += 1;
        ++steps;
        emit(TraceEvent::Kind::Move, v->player, v->add_to, v->remove_from, gain);
        if (steps > step_cap) {
          throw NonTerminationError("packet dynamics exceeded the iteration cap",
                                    state.to_profile());
        }
      }
    }
  }
  result.profile = state.to_profile();
  result.certified_local_optimal = true;
  return result;
}

ApproxResult solve_approx(const Game& g, double epsilon) {
  PacketSchedule schedule = packet_size(g, epsilon);
  EquilibriumResult eq = solve_integral(g, schedule.k);
  double tol = epsilon / 100.0;
  GapCertificate cert = epsilon_gap(g, eq.profile, tol);
  if (cert.max_gap > epsilon * (1.0 + 1e-9) + 1e-12) {
    throw InternalError("certified gap " + std::to_string(cert.max_gap) +
                        " exceeds requested epsilon " + std::to_string(epsilon));
  }
  return ApproxResult{std::move(eq), std::move(schedule), std::move(cert)};
}

}  // namespace congsolve

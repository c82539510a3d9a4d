// Acceptance suite: each numbered check prints one PASS/FAIL line and the
// binary exits nonzero if any fails. Run directly or through ctest.
//
//   acceptance [--cli /path/to/congsolve]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "congsolve/cournot.hpp"
#include "congsolve/instance_io.hpp"
#include "congsolve/integral_solver.hpp"

using namespace congsolve;

namespace {

std::string g_cli_path;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw CheckFailure(message);
}

int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random two-resource game with affine costs, slopes on a 1/16 grid capped at
// 1 and at least one cost pinned to slope exactly 1, unit demands, full
// simplex strategy spaces. This keeps L = 1, delta = 1 and rho_gcd = 1.
Game random_affine_instance(std::mt19937_64& rng, int players) {
  std::vector<PlayerSpec> specs;
  std::vector<std::vector<CostFunction>> costs;
  int pinned_player = rand_int(rng, 0, players - 1);
  int pinned_resource = rand_int(rng, 0, 1);
  for (int i = 0; i < players; ++i) {
    specs.push_back(PlayerSpec{Rational(1), Polymatroid::simplex(2, 0b11, Rational(1))});
    std::vector<CostFunction> row;
    for (int e = 0; e < 2; ++e) {
      double slope = (i == pinned_player && e == pinned_resource)
                         ? 1.0
                         : rand_int(rng, 1, 16) / 16.0;
      double intercept = rand_int(rng, 0, 16) / 8.0;
      row.push_back(CostFunction::affine(intercept, slope));
    }
    costs.push_back(std::move(row));
  }
  return Game({"e1", "e2"}, std::move(specs), std::move(costs));
}

std::vector<Game> criterion_instances() {
  std::mt19937_64 rng(20240817);
  std::vector<Game> games;
  for (int t = 0; t < 20; ++t) games.push_back(random_affine_instance(rng, 1 + t % 2));
  return games;
}

// --- criterion bodies -------------------------------------------------------

void criterion_1_end_to_end() {
  const std::vector<std::pair<double, Rational>> cases = {{1.0, Rational(1, 16)},
                                                          {0.5, Rational(1, 32)}};
  for (const Game& g : criterion_instances()) {
    for (const auto& [eps, expected_k] : cases) {
      ApproxResult res = solve_approx(g, eps);
      require(res.schedule.k == expected_k,
              "k_eps mismatch: got " + res.schedule.k.str() + " want " + expected_k.str());
      require(res.certificate.max_gap <= eps,
              "certified gap " + std::to_string(res.certificate.max_gap) + " above epsilon");
      require(res.certificate.tol == eps / 100.0, "verification tolerance drifted");
    }
  }
}

void criterion_2_chain_bound() {
  const double tol = 1e-3;
  const std::vector<Rational> ks = {Rational(1, 2), Rational(1, 4), Rational(1, 8)};
  for (const Game& g : criterion_instances()) {
    double lip = game_lipschitz(g);
    double delta = g.max_demand().to_double();
    double m = g.num_resources();
    std::vector<double> gaps;
    for (const Rational& k : ks) {
      EquilibriumResult eq = solve_integral(g, k);
      GapCertificate cert = epsilon_gap(g, eq.profile, tol);
      double bound = 2.0 * k.to_double() * lip * (delta + 1.0) * m * m * delta;
      require(cert.max_gap <= bound + 10.0 * tol,
              "gap " + std::to_string(cert.max_gap) + " above the chain bound " +
                  std::to_string(bound));
      gaps.push_back(cert.max_gap);
    }
    for (std::size_t j = 1; j < gaps.size(); ++j) {
      require(gaps[j] <= gaps[j - 1] + tol, "gap did not shrink when k halved");
    }
  }
}

void criterion_3_exact_oracle() {
  const std::vector<CostFunction> menu = {CostFunction::affine(0, 1), CostFunction::affine(0, 2),
                                          CostFunction({0, 0, 1})};
  const Rational k(1);
  int games = 0;
  for (int c0 = 0; c0 < 3; ++c0)
  for (int c1 = 0; c1 < 3; ++c1)
  for (int c2 = 0; c2 < 3; ++c2)
  for (int c3 = 0; c3 < 3; ++c3) {
    for (long long d0 = 1; d0 <= 2; ++d0)
    for (long long d1 = 1; d1 <= 2; ++d1) {
      std::vector<PlayerSpec> players = {
          PlayerSpec{Rational(d0), Polymatroid::simplex(2, 0b11, Rational(d0))},
          PlayerSpec{Rational(d1), Polymatroid::simplex(2, 0b11, Rational(d1))}};
      std::vector<std::vector<CostFunction>> costs = {{menu[c0], menu[c1]},
                                                      {menu[c2], menu[c3]}};
      Game g({"e1", "e2"}, std::move(players), std::move(costs));
      EquilibriumResult eq = solve_integral(g, k);
      ++games;

      // Full enumeration of unilateral integral deviations.
      for (int i = 0; i < 2; ++i) {
        double own = player_cost(g, eq.profile, i);
        long long demand = (i == 0) ? d0 : d1;
        for (long long a = 0; a <= demand; ++a) {
          std::vector<double> y = {static_cast<double>(a), static_cast<double>(demand - a)};
          require(own <= deviation_cost(g, eq.profile, i, y) + 1e-9,
                  "profitable deviation found by enumeration");
        }
      }
    }
  }
  require(games >= 81, "too few oracle games");
}

void criterion_4_symmetric_closed_form() {
  for (int n : {2, 3}) {
    for (int m : {2, 3}) {
      Subset full = (Subset{1} << m) - 1;
      std::vector<PlayerSpec> players;
      std::vector<std::vector<CostFunction>> costs;
      for (int i = 0; i < n; ++i) {
        players.push_back(PlayerSpec{Rational(1), Polymatroid::simplex(m, full, Rational(1))});
        costs.push_back(std::vector<CostFunction>(m, CostFunction::affine(0, 1)));
      }
      std::vector<std::string> names;
      for (int e = 0; e < m; ++e) names.push_back("e" + std::to_string(e + 1));
      Game g(std::move(names), std::move(players), std::move(costs));

      Rational k(1, n * m);
      EquilibriumResult eq = solve_integral(g, k);
      for (int i = 0; i < n; ++i) {
        for (int e = 0; e < m; ++e) {
          require(eq.profile.exact_load(i, e) == Rational(1, m),
                  "player load is not exactly 1/m");
        }
      }
      const double tol = 1e-6;
      GapCertificate cert = epsilon_gap(g, eq.profile, tol);
      require(cert.max_gap <= tol, "symmetric equilibrium has a nonzero gap");
    }
  }
}

void criterion_5_marginal_suites() {
  std::mt19937_64 rng(5150);
  auto instances = criterion_instances();

  // Marginal bounds on 1000 random feasible integral profiles.
  int samples = 0;
  const std::vector<Rational> ks = {Rational(1), Rational(1, 2), Rational(1, 4)};
  while (samples < 1000) {
    const Game& g = instances[static_cast<std::size_t>(rand_int(rng, 0, 19))];
    Rational k = ks[static_cast<std::size_t>(rand_int(rng, 0, 2))];
    double kd = k.to_double();
    double lip = game_lipschitz(g);
    double delta = g.max_demand().to_double();
    std::int64_t packets = (Rational(1) / k).floor().convert_to<std::int64_t>();
    std::vector<std::vector<std::int64_t>> counts(
        g.num_players(), std::vector<std::int64_t>(2, 0));
    for (int i = 0; i < g.num_players(); ++i) {
      counts[i][0] = rand_int(rng, 0, static_cast<int>(packets));
      counts[i][1] = packets - counts[i][0];
    }
    Profile x = Profile::integral(k, std::move(counts));
    for (int i = 0; i < g.num_players(); ++i) {
      for (int e = 0; e < 2; ++e) {
        double mu = marginal(g, x, i, e);
        double bound = kd * lip * (delta + 1.0);
        require(marginal_up(g, x, i, e, kd) / kd <= mu + bound + 1e-9,
                "packet-add marginal above its bound");
        auto down = marginal_down(g, x, i, e, kd);
        if (down.has_value()) {
          require(*down / kd >= mu - bound - 1e-9, "packet-remove marginal below its bound");
        }
        ++samples;
      }
    }
  }

  // Every solver equilibrium passes the exchange conditions.
  for (const Game& g : instances) {
    Rational k(1, 8);
    EquilibriumResult eq = solve_integral(g, k);
    require(!local_violation(g, k, eq.profile).has_value(), "equilibrium has a violation");
    double kd = k.to_double();
    double bound = 2.0 * kd * game_lipschitz(g) * (g.max_demand().to_double() + 1.0);
    for (int i = 0; i < g.num_players(); ++i) {
      LoadVector loads = eq.profile.exact_loads(i);
      for (int e = 0; e < 2; ++e) {
        for (int f = 0; f < 2; ++f) {
          if (e == f) continue;
          if (!exchange_capacity(g.strategy_space(i), g.demand(i), loads, e, f).is_positive()) {
            continue;
          }
          double up = marginal_up(g, eq.profile, i, e, kd);
          auto down = marginal_down(g, eq.profile, i, f, kd);
          require(down.has_value(), "exchange with no load to remove");
          require(up >= *down - 1e-9, "discrete exchange condition violated");
          double drop = marginal(g, eq.profile, i, e) - marginal(g, eq.profile, i, f);
          require(drop >= -bound - 1e-9, "marginal difference below the exchange value bound");
        }
      }
    }
  }
}

void criterion_6_transshipment_identity() {
  std::mt19937_64 rng(6251);

  struct Family {
    std::string name;
    std::function<Polymatroid()> make;
  };
  std::vector<Family> families;
  families.push_back({"simplex-2", [] { return Polymatroid::simplex(2, 0b11, Rational(2)); }});
  families.push_back({"simplex-3", [] { return Polymatroid::simplex(3, 0b111, Rational(2)); }});
  families.push_back({"table-3", [] {
                        // Coverage of {e1},{e2,e3},{e1,e2,e3} with weights 1, 1/2, 1/2.
                        std::vector<Rational> t(8);
                        for (Subset u = 1; u < 8; ++u) {
                          Rational v;
                          if (u & 0b001) v += Rational(1);
                          if (u & 0b110) v += Rational(1, 2);
                          v += Rational(1, 2);  // ground-set term
                          t[u] = v;
                        }
                        return Polymatroid::explicit_table(3, std::move(t));
                      }});

  for (const Family& family : families) {
    Polymatroid p = family.make();
    const int m = p.ground_size();
    Rational d = p.rank_ground();
    std::vector<PlayerSpec> players = {PlayerSpec{d, p}};
    std::vector<std::vector<CostFunction>> costs(1);
    for (int e = 0; e < m; ++e) {
      costs[0].push_back(CostFunction({0.25 * rand_int(rng, 0, 4), 0.1 * rand_int(rng, 1, 10),
                                       0.05 * rand_int(rng, 0, 4)}));
    }
    std::vector<std::string> names;
    for (int e = 0; e < m; ++e) names.push_back("e" + std::to_string(e + 1));
    Game g(std::move(names), std::move(players), std::move(costs));

    for (int trial = 0; trial < 500; ++trial) {
      // Exact profile: a vertex; deviation target: rational mix of vertices.
      std::vector<double> w1(m), w2(m), w3(m);
      for (double& v : w1) v = rand_int(rng, -100, 100) / 37.0;
      for (double& v : w2) v = rand_int(rng, -100, 100) / 37.0;
      for (double& v : w3) v = rand_int(rng, -100, 100) / 37.0;
      LoadVector xv = greedy_linear_min(p, d, w1);
      LoadVector a = greedy_linear_min(p, d, w2);
      LoadVector b = greedy_linear_min(p, d, w3);
      Rational lambda(rand_int(rng, 0, 8), 8);
      LoadVector y(m);
      for (int e = 0; e < m; ++e) y[e] = a[e] * lambda + b[e] * (Rational(1) - lambda);

      // Express x as an integral profile at the granularity of its entries.
      std::vector<Rational> values = {d};
      for (const Rational& v : xv) values.push_back(v);
      Rational k = rho_gcd(values);
      std::vector<std::vector<std::int64_t>> counts(1, std::vector<std::int64_t>(m, 0));
      for (int e = 0; e < m; ++e) {
        counts[0][e] = (xv[e] / k).floor().convert_to<std::int64_t>();
      }
      Profile x = Profile::integral(k, std::move(counts));

      Transshipment t = transshipment(p, d, xv, y);
      for (std::size_t s = 0; s < t.sources.size(); ++s) {
        Rational out;
        for (std::size_t q = 0; q < t.sinks.size(); ++q) {
          require(!t.flow[s][q].is_negative() && t.flow[s][q] <= t.capacity[s][q],
                  family.name + ": flow outside its capacity");
          out += t.flow[s][q];
        }
        require(out == xv[t.sources[s]] - y[t.sources[s]], family.name + ": supply not met");
      }
      for (std::size_t q = 0; q < t.sinks.size(); ++q) {
        Rational in;
        for (std::size_t s = 0; s < t.sources.size(); ++s) in += t.flow[s][q];
        require(in == y[t.sinks[q]] - xv[t.sinks[q]], family.name + ": demand not met");
      }

      auto [lhs, rhs] = gradient_decomposition(g, x, 0, y);
      require(std::abs(lhs - rhs) <= 1e-9, family.name + ": gradient routes disagree by " +
                                               std::to_string(std::abs(lhs - rhs)));
    }
  }
}

void criterion_7_cournot_pipeline() {
  // Duopoly on one shared market, p(t) = 10 - t, no production costs.
  Firm base;
  base.markets = {0};
  base.production_cost_coef = 0.0;
  base.prices = {PriceFunction::affine(10, 1)};
  Oligopoly duo({"m1"}, {base, base});
  CournotSolution duo_sol = solve_cournot(duo, 0.5);
  for (int i = 0; i < 2; ++i) {
    double q = duo_sol.quantities[i][0].to_double();
    require(std::abs(q - 10.0 / 3.0) <= 0.25,
            "duopoly quantity " + std::to_string(q) + " away from 10/3");
  }
  require(duo_sol.certificate.max_gap <= 0.5, "duopoly certificate gap above 0.5");

  // Monopoly with production cost t^2: optimum 2.5.
  Firm mono = base;
  mono.production_cost_coef = 1.0;
  Oligopoly monopoly({"m1"}, {mono});
  CournotSolution mono_sol = solve_cournot(monopoly, 0.5);
  double q = mono_sol.quantities[0][0].to_double();
  require(std::abs(q - 2.5) <= 0.25, "monopoly quantity " + std::to_string(q) + " away from 2.5");
  require(mono_sol.certificate.max_gap <= 0.5, "monopoly certificate gap above 0.5");

  // Isomorphism constancy on 100 random profiles per fixture.
  std::mt19937_64 rng(7351);
  for (const Oligopoly& o : {duo, monopoly}) {
    auto [game, map] = to_congestion_game(o);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::vector<double>> qm(o.num_firms(),
                                          std::vector<double>(o.num_markets(), 0.0));
      for (int i = 0; i < o.num_firms(); ++i) {
        qm[i][0] = rand_int(rng, 0, 1000) / 100.0;
      }
      std::vector<double> u = firm_utility(o, qm);
      std::vector<std::vector<double>> loads;
      for (int i = 0; i < o.num_firms(); ++i) loads.push_back(map_strategy(map, i, qm[i]));
      Profile mapped = Profile::continuous(loads);
      for (int i = 0; i < o.num_firms(); ++i) {
        double total = u[i] + player_cost(game, mapped, i);
        require(std::abs(total - map.firms[i].shift) <= 1e-9,
                "utility/cost sum drifted by " + std::to_string(total - map.firms[i].shift));
      }
    }
  }
}

void criterion_8_determinism() {
  require(!g_cli_path.empty(), "CLI path not supplied (use --cli or CONGSOLVE_BIN)");
  auto dir = std::filesystem::temp_directory_path() / "congsolve_acceptance";
  std::filesystem::create_directories(dir);
  auto instance = dir / "symm2x2.json";
  {
    std::ofstream out(instance);
    out << R"({
  "version": 1,
  "kind": "congestion",
  "congestion": {
    "resources": ["e1", "e2"],
    "players": [
      {"demand": "1", "polymatroid": {"simplex": {"allowed": ["e1", "e2"], "rank": "1"}}},
      {"demand": "1", "polymatroid": {"simplex": {"allowed": ["e1", "e2"], "rank": "1"}}}
    ],
    "costs": [
      [[0.0, 1.0], [0.25, 0.5]],
      [[0.5, 0.75], [0.0, 1.0]]
    ]
  }
})";
  }
  auto run_once = [&](const std::string& tag) {
    auto out = dir / ("report_" + tag + ".json");
    std::string cmd = g_cli_path + " solve --epsilon 0.5 --out " + out.string() + " " +
                      instance.string() + " 2>/dev/null";
    require(std::system(cmd.c_str()) == 0, "CLI solve failed");
    std::ifstream in(out);
    Json j = Json::parse(in);
    j.erase("wall_time_s");
    return j.dump();
  };
  require(run_once("a") == run_once("b"), "reports differ between identical runs");
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
  }
  if (g_cli_path.empty()) {
    if (const char* env = std::getenv("CONGSOLVE_BIN")) g_cli_path = env;
  }
#ifdef CONGSOLVE_BIN_PATH
  if (g_cli_path.empty()) g_cli_path = CONGSOLVE_BIN_PATH;
#endif

  struct Criterion {
    std::string name;
    std::function<void()> body;
    double time_limit_s;
  };
  const std::vector<Criterion> criteria = {
      {"1. end-to-end: k_eps schedule and certified gap", criterion_1_end_to_end, 60.0},
      {"2. chain bound and gap decay at forced k", criterion_2_chain_bound, 30.0},
      {"3. exact-equilibrium oracle equivalence", criterion_3_exact_oracle, 10.0},
      {"4. symmetric closed form, exact rational loads", criterion_4_symmetric_closed_form, 30.0},
      {"5. marginal and exchange inequality suites", criterion_5_marginal_suites, 10.0},
      {"6. transshipment flows and gradient identity", criterion_6_transshipment_identity, 30.0},
      {"7. cournot pipeline against closed forms", criterion_7_cournot_pipeline, 120.0},
      {"8. byte-identical reports across runs", criterion_8_determinism, 30.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string note;
    bool ok = true;
    try {
      c.body();
    } catch (const std::exception& e) {
      ok = false;
      note = e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && elapsed > c.time_limit_s) {
      ok = false;
      note = "exceeded time limit of " + std::to_string(c.time_limit_s) + " s";
    }
    std::ostringstream line;
    line << (ok ? "[PASS] " : "[FAIL] ") << c.name << " (" << elapsed << " s)";
    if (!ok) line << " -- " << note;
    std::cout << line.str() << std::endl;
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}

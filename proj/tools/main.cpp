// Command-line driver: solve / verify / cournot / validate / bench over JSON
// instance files. Exit codes: 0 ok, 2 parse or usage error, 3 infeasible
// model or profile, 4 work budget exceeded, 5 internal error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "congsolve/instance_io.hpp"

namespace {

using namespace congsolve;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_output(const Json& j, const std::string& out_path) {
  std::string text = j.dump(2);
  text += "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot open output file '" + out_path + "'");
  out << text;
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) {
    if (path.empty()) return;
    out_.emplace(path);
    if (!*out_) throw InputError("cannot open trace file '" + path + "'");
    *out_ << "step,event,player,to_resource,from_resource,gain\n";
  }

  SolveOptions options(const Game& g) {
    SolveOptions opts;
    if (!out_) return opts;
    const auto& names = g.resource_names();
    opts.on_event = [this, names](const TraceEvent& ev) {
      *out_ << ev.step << ','
            << (ev.kind == TraceEvent::Kind::Place ? "place" : "move") << ','
            << ev.player << ',' << names[ev.to] << ','
            << (ev.from >= 0 ? names[ev.from] : "") << ',' << ev.gain << '\n';
    };
    return opts;
  }

 private:
  std::optional<std::ofstream> out_;
};

const Game& require_congestion(const Instance& inst) {
  if (!inst.is_congestion()) {
    throw InputError("this subcommand needs a \"congestion\" instance");
  }
  return inst.game();
}

void check_budget(const Game& g, const Rational& k, std::int64_t budget, bool force) {
  BigInt packets = (g.max_demand() / k).ceil();
  BigInt work = work_estimate(g, k);
  std::cerr << "predicted packets per player: " << packets.str() << " (work estimate "
            << work.str() << ", budget " << budget << ")\n";
  if (!force && work > budget) {
    throw BudgetError("work estimate " + work.str() + " exceeds budget " +
                      std::to_string(budget) + "; pass --force or raise --budget");
  }
}

std::vector<Rational> parse_k_list(const std::string& text) {
  std::vector<Rational> ks;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) ks.push_back(Rational::parse(part));
  if (ks.empty()) throw InputError("--k needs at least one packet size");
  return ks;
}

int run_solve(const std::string& instance_path, std::optional<double> epsilon,
              const std::string& k_text, std::int64_t budget, bool force,
              const std::string& out_path, const std::string& trace_path, double tol_flag) {
  auto start = Clock::now();
  Instance inst = parse_instance(instance_path);
  const Game& g = require_congestion(inst);

  PacketSchedule schedule;
  if (!k_text.empty()) {
    schedule.k = Rational::parse(k_text);
    if (!schedule.k.is_positive()) throw InputError("--k must be positive");
    schedule.epsilon = epsilon.value_or(0.0);
    schedule.lipschitz = game_lipschitz(g);
    schedule.delta = g.max_demand();
    schedule.num_resources = g.num_resources();
    std::vector<Rational> values;
    for (int i = 0; i < g.num_players(); ++i) {
      auto rv = rank_values(g.strategy_space(i));
      values.insert(values.end(), rv.begin(), rv.end());
      values.push_back(g.demand(i));
    }
    schedule.rho_gcd_value = rho_gcd(values);
    schedule.divisor = 1;
  } else {
    if (!epsilon) throw InputError("solve needs --epsilon (or an explicit --k)");
    schedule = packet_size(g, *epsilon);
  }
  check_budget(g, schedule.k, budget, force);

  TraceWriter trace(trace_path);
  EquilibriumResult eq = solve_integral(g, schedule.k, trace.options(g));
  double tol = tol_flag > 0.0 ? tol_flag : (epsilon ? *epsilon / 100.0 : 1e-6);
  GapCertificate cert = epsilon_gap(g, eq.profile, tol);
  if (epsilon && k_text.empty() && cert.max_gap > *epsilon * (1.0 + 1e-9) + 1e-12) {
    throw InternalError("certified gap exceeds requested epsilon");
  }
  write_output(solve_report(g, eq, schedule, cert, seconds_since(start)), out_path);
  return 0;
}

int run_verify(const std::string& instance_path, const std::string& profile_path, double tol,
               const std::string& out_path) {
  Instance inst = parse_instance(instance_path);
  const Game& g = require_congestion(inst);
  std::ifstream in(profile_path);
  if (!in) throw InputError("cannot open profile file '" + profile_path + "'");
  Json report;
  try {
    report = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("profile file: ") + e.what());
  }
  Profile x = profile_from_report(g, report);
  if (!profile_feasible(g, x)) {
    throw InfeasibleError("profile is not feasible for this instance");
  }
  GapCertificate cert = epsilon_gap(g, x, tol);
  write_output(certificate_json(cert), out_path);
  return 0;
}

int run_cournot(const std::string& instance_path, double epsilon, std::int64_t budget, bool force,
                const std::string& out_path) {
  auto start = Clock::now();
  Instance inst = parse_instance(instance_path);
  if (inst.is_congestion()) {
    throw InputError("this subcommand needs a \"cournot\" instance");
  }
  const Oligopoly& o = inst.oligopoly();
  auto [game, map] = to_congestion_game(o);
  PacketSchedule schedule = packet_size(game, epsilon);
  check_budget(game, schedule.k, budget, force);
  CournotSolution sol = solve_cournot(o, epsilon);
  write_output(cournot_report(o, sol, seconds_since(start)), out_path);
  return 0;
}

int run_validate(const std::string& instance_path) {
  Instance inst = parse_instance(instance_path);
  if (inst.is_congestion()) {
    const Game& g = inst.game();
    std::cout << "ok: congestion game with " << g.num_players() << " players and "
              << g.num_resources() << " resources\n";
  } else {
    const Oligopoly& o = inst.oligopoly();
    std::cout << "ok: cournot oligopoly with " << o.num_firms() << " firms and "
              << o.num_markets() << " markets\n";
  }
  return 0;
}

int run_bench(const std::string& instance_path, const std::string& k_text, double tol,
              const std::string& out_path) {
  Instance inst = parse_instance(instance_path);
  const Game& g = require_congestion(inst);
  std::vector<Rational> ks = parse_k_list(k_text);
  std::ostringstream csv;
  csv << "k,max_gap,best_response_count,demand_increments,wall_time_s\n";
  for (const Rational& k : ks) {
    auto start = Clock::now();
    EquilibriumResult eq = solve_integral(g, k);
    GapCertificate cert = epsilon_gap(g, eq.profile, tol);
    csv << k.str() << ',' << cert.max_gap << ',' << eq.best_response_count << ','
        << eq.demand_increments << ',' << seconds_since(start) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot open output file '" + out_path + "'");
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon-approximate equilibria for splittable polymatroid congestion games"};
  app.require_subcommand(1);

  std::string instance_path, out_path, trace_path, profile_path, k_text;
  double epsilon = 0.0, tol = 0.0;
  bool force = false;
  std::int64_t budget = 1000000000;

  CLI::App* solve = app.add_subcommand("solve", "compute an approximate equilibrium");
  solve->add_option("instance", instance_path)->required();
  CLI::Option* solve_eps = solve->add_option("--epsilon", epsilon, "target equilibrium gap");
  solve->add_option("--k", k_text, "packet size override, e.g. 1/8");
  solve->add_option("--budget", budget, "work budget (elementary steps)");
  solve->add_flag("--force", force, "run even above the budget");
  solve->add_option("--out", out_path, "report file (default: stdout)");
  solve->add_option("--trace", trace_path, "CSV trace of the packet dynamics");
  solve->add_option("--tol", tol, "verification tolerance (default epsilon/100)");

  CLI::App* verify = app.add_subcommand("verify", "recompute the gap certificate of a profile");
  verify->add_option("instance", instance_path)->required();
  verify->add_option("--profile", profile_path, "report file holding k and profile")->required();
  verify->add_option("--tol", tol, "verification tolerance");
  verify->add_option("--out", out_path, "certificate file (default: stdout)");

  CLI::App* cournot = app.add_subcommand("cournot", "solve a multimarket oligopoly");
  cournot->add_option("instance", instance_path)->required();
  cournot->add_option("--epsilon", epsilon, "target equilibrium gap")->required();
  cournot->add_option("--budget", budget, "work budget (elementary steps)");
  cournot->add_flag("--force", force, "run even above the budget");
  cournot->add_option("--out", out_path, "report file (default: stdout)");

  CLI::App* validate = app.add_subcommand("validate", "check an instance file");
  validate->add_option("instance", instance_path)->required();

  CLI::App* bench = app.add_subcommand("bench", "gap versus packet size sweep");
  bench->add_option("instance", instance_path)->required();
  bench->add_option("--k", k_text, "comma-separated packet sizes, e.g. 1,1/2,1/4")->required();
  bench->add_option("--tol", tol, "verification tolerance");
  bench->add_option("--out", out_path, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      std::optional<double> eps;
      if (solve_eps->count() > 0) eps = epsilon;
      return run_solve(instance_path, eps, k_text, budget, force, out_path, trace_path, tol);
    }
    if (*verify) return run_verify(instance_path, profile_path, tol > 0.0 ? tol : 1e-6, out_path);
    if (*cournot) return run_cournot(instance_path, epsilon, budget, force, out_path);
    if (*validate) return run_validate(instance_path);
    if (*bench) return run_bench(instance_path, k_text, tol > 0.0 ? tol : 1e-6, out_path);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  } catch (...) {
    std::cerr << "internal error\n";
    return 5;
  }
  return 2;
}

#include "congsolve/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace congsolve {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InputError(path + ": " + message);
}

const Json& member(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

void reject_unknown(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(path, "unknown field '" + item.key() + "'");
  }
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Rational get_rational(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected an exact rational string like \"3/4\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

CostFunction get_cost(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of polynomial coefficients");
  std::vector<double> coef;
  for (std::size_t c = 0; c < j.size(); ++c) {
    coef.push_back(get_number(j[c], path + "[" + std::to_string(c) + "]"));
  }
  try {
    return CostFunction(coef);
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

std::vector<std::string> get_name_list(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of names");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string name = get_string(j[i], path + "[" + std::to_string(i) + "]");
    if (!seen.insert(name).second) fail(path, "duplicate name '" + name + "'");
    names.push_back(std::move(name));
  }
  return names;
}

int name_index(const std::string& name, const std::vector<std::string>& names,
               const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  fail(path, "unknown resource '" + name + "'");
}

Subset parse_subset_key(const std::string& key, const std::vector<std::string>& names,
                        const std::string& path) {
  Subset u = 0;
  if (key.empty()) return u;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    Subset bit = Subset{1} << name_index(part, names, path);
    if (u & bit) fail(path, "duplicate resource '" + part + "' in subset key");
    u |= bit;
  }
  return u;
}

Polymatroid parse_polymatroid(const Json& j, const std::vector<std::string>& resources,
                              const std::string& path) {
  if (!j.is_object() || j.size() != 1) {
    fail(path, "expected exactly one of 'simplex' or 'explicit'");
  }
  const int m = static_cast<int>(resources.size());
  if (j.contains("simplex")) {
    const Json& s = j["simplex"];
    std::string spath = path + ".simplex";
    reject_unknown(s, spath, {"allowed", "rank"});
    const Json& allowed_json = member(s, spath, "allowed");
    if (!allowed_json.is_array()) fail(spath + ".allowed", "expected an array of names");
    Subset allowed = 0;
    for (std::size_t i = 0; i < allowed_json.size(); ++i) {
      std::string apath = spath + ".allowed[" + std::to_string(i) + "]";
      allowed |= Subset{1} << name_index(get_string(allowed_json[i], apath), resources, apath);
    }
    Rational rank = get_rational(member(s, spath, "rank"), spath + ".rank");
    try {
      return Polymatroid::simplex(m, allowed, std::move(rank));
    } catch (const InputError& e) {
      fail(spath, e.what());
    }
  }
  if (j.contains("explicit")) {
    const Json& t = j["explicit"];
    std::string tpath = path + ".explicit";
    if (!t.is_object()) fail(tpath, "expected a subset-to-rank table");
    if (m > 20) fail(tpath, "explicit tables support at most 20 resources");
    std::vector<Rational> table(std::size_t{1} << m);
    std::vector<bool> present(table.size(), false);
    for (const auto& item : t.items()) {
      std::string epath = tpath + "[\"" + item.key() + "\"]";
      Subset u = parse_subset_key(item.key(), resources, epath);
      if (present[u]) fail(epath, "subset listed twice");
      present[u] = true;
      table[u] = get_rational(item.value(), epath);
    }
    for (std::size_t u = 0; u < table.size(); ++u) {
      if (!present[u]) {
        fail(tpath, "table is missing subset '" + subset_names(u, resources) + "'");
      }
    }
    Polymatroid p = Polymatroid::explicit_table(m, std::move(table));
    if (auto v = p.validate()) {
      fail(tpath, "rank table violates the " + v->axiom + " axiom at (" +
                      subset_names(v->u, resources) + ", " + subset_names(v->v, resources) + ")");
    }
    return p;
  }
  fail(path, "expected 'simplex' or 'explicit'");
}

Game parse_congestion(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"resources", "players", "costs"});
  std::vector<std::string> resources =
      get_name_list(member(j, path, "resources"), path + ".resources");

  const Json& players_json = member(j, path, "players");
  if (!players_json.is_array() || players_json.empty()) {
    fail(path + ".players", "expected a nonempty array");
  }
  std::vector<PlayerSpec> players;
  for (std::size_t i = 0; i < players_json.size(); ++i) {
    std::string ppath = path + ".players[" + std::to_string(i) + "]";
    const Json& pj = players_json[i];
    reject_unknown(pj, ppath, {"demand", "polymatroid"});
    Rational demand = get_rational(member(pj, ppath, "demand"), ppath + ".demand");
    if (demand.is_negative()) fail(ppath + ".demand", "demand must be nonnegative");
    Polymatroid poly =
        parse_polymatroid(member(pj, ppath, "polymatroid"), resources, ppath + ".polymatroid");
    players.push_back(PlayerSpec{std::move(demand), std::move(poly)});
  }

  const Json& costs_json = member(j, path, "costs");
  if (!costs_json.is_array() || costs_json.size() != players.size()) {
    fail(path + ".costs", "expected one cost row per player");
  }
  std::vector<std::vector<CostFunction>> costs;
  for (std::size_t i = 0; i < costs_json.size(); ++i) {
    std::string rpath = path + ".costs[" + std::to_string(i) + "]";
    if (!costs_json[i].is_array() || costs_json[i].size() != resources.size()) {
      fail(rpath, "expected one coefficient array per resource");
    }
    std::vector<CostFunction> row;
    for (std::size_t e = 0; e < resources.size(); ++e) {
      row.push_back(get_cost(costs_json[i][e], rpath + "[" + std::to_string(e) + "]"));
    }
    costs.push_back(std::move(row));
  }
  try {
    return Game(std::move(resources), std::move(players), std::move(costs));
  } catch (const InfeasibleError&) {
    throw;
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

PriceFunction parse_price(const Json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) fail(path, "expected one of 'affine' or 'quad'");
  if (j.contains("affine")) {
    const Json& a = j["affine"];
    if (!a.is_array() || a.size() != 2) fail(path + ".affine", "expected [a, b]");
    double pa = get_number(a[0], path + ".affine[0]");
    double pb = get_number(a[1], path + ".affine[1]");
    try {
      return PriceFunction::affine(pa, pb);
    } catch (const InputError& e) {
      fail(path + ".affine", e.what());
    }
  }
  if (j.contains("quad")) {
    const Json& a = j["quad"];
    if (!a.is_array() || a.size() != 3) fail(path + ".quad", "expected [a, b, c]");
    double pa = get_number(a[0], path + ".quad[0]");
    double pb = get_number(a[1], path + ".quad[1]");
    double pc = get_number(a[2], path + ".quad[2]");
    try {
      return PriceFunction::concave_quadratic(pa, pb, pc);
    } catch (const InputError& e) {
      fail(path + ".quad", e.what());
    }
  }
  fail(path, "expected 'affine' or 'quad'");
}

Oligopoly parse_cournot(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"markets", "firms"});
  std::vector<std::string> markets = get_name_list(member(j, path, "markets"), path + ".markets");
  const Json& firms_json = member(j, path, "firms");
  if (!firms_json.is_array() || firms_json.empty()) {
    fail(path + ".firms", "expected a nonempty array");
  }
  std::vector<Firm> firms;
  for (std::size_t i = 0; i < firms_json.size(); ++i) {
    std::string fpath = path + ".firms[" + std::to_string(i) + "]";
    const Json& fj = firms_json[i];
    reject_unknown(fj, fpath, {"markets", "c", "prices"});
    Firm firm;
    const Json& fm = member(fj, fpath, "markets");
    if (!fm.is_array() || fm.empty()) fail(fpath + ".markets", "expected a nonempty array");
    for (std::size_t e = 0; e < fm.size(); ++e) {
      std::string mpath = fpath + ".markets[" + std::to_string(e) + "]";
      firm.markets.push_back(name_index(get_string(fm[e], mpath), markets, mpath));
    }
    firm.production_cost_coef = get_number(member(fj, fpath, "c"), fpath + ".c");
    const Json& prices = member(fj, fpath, "prices");
    if (!prices.is_object()) fail(fpath + ".prices", "expected an object keyed by market");
    std::set<std::string> allowed_keys;
    for (std::size_t e = 0; e < fm.size(); ++e) allowed_keys.insert(fm[e].get<std::string>());
    reject_unknown(prices, fpath + ".prices", allowed_keys);
    for (std::size_t e = 0; e < fm.size(); ++e) {
      std::string market = fm[e].get<std::string>();
      std::string ppath = fpath + ".prices[\"" + market + "\"]";
      if (!prices.contains(market)) fail(fpath + ".prices", "missing price for '" + market + "'");
      firm.prices.push_back(parse_price(prices[market], ppath));
    }
    firms.push_back(std::move(firm));
  }
  try {
    return Oligopoly(std::move(markets), std::move(firms));
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

}  // namespace

std::string subset_names(Subset u, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (std::size_t e = 0; e < names.size(); ++e) {
    if (u & (Subset{1} << e)) {
      if (!first) out += ",";
      out += names[e];
      first = false;
    }
  }
  return out + "}";
}

Instance parse_instance_json(const Json& root) {
  const std::string path = "$";
  if (!root.is_object()) fail(path, "expected a JSON object");
  int version = 0;
  const Json& v = member(root, path, "version");
  if (!v.is_number_integer()) fail(path + ".version", "expected an integer");
  version = v.get<int>();
  if (version != 1) fail(path + ".version", "unsupported format version");
  std::string kind = get_string(member(root, path, "kind"), path + ".kind");
  if (kind == "congestion") {
    reject_unknown(root, path, {"version", "kind", "congestion"});
    return Instance{parse_congestion(member(root, path, "congestion"), path + ".congestion")};
  }
  if (kind == "cournot") {
    reject_unknown(root, path, {"version", "kind", "cournot"});
    return Instance{parse_cournot(member(root, path, "cournot"), path + ".cournot")};
  }
  fail(path + ".kind", "expected \"congestion\" or \"cournot\"");
}

Instance parse_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path.string() + "'");
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("instance file '" + path.string() + "': " + e.what());
  }
  return parse_instance_json(root);
}

namespace {

Json rational_string(const Rational& r) { return Json(r.str()); }

Json profile_json(const Profile& p) {
  Json rows = Json::array();
  for (int i = 0; i < p.num_players(); ++i) {
    Json row = Json::array();
    for (int e = 0; e < p.num_resources(); ++e) {
      row.push_back(p.exact_load(i, e).str());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json gaps_json(const GapCertificate& cert) {
  Json gaps = Json::array();
  for (const auto& entry : cert.players) gaps.push_back(entry.gap);
  return gaps;
}

}  // namespace

Json certificate_json(const GapCertificate& cert) {
  Json j;
  j["kind"] = "certificate";
  j["tol"] = cert.tol;
  j["gaps"] = gaps_json(cert);
  j["max_gap"] = cert.max_gap;
  Json witnesses = Json::array();
  for (const auto& entry : cert.players) witnesses.push_back(entry.witness);
  j["witnesses"] = std::move(witnesses);
  return j;
}

Json solve_report(const Game& g, const EquilibriumResult& eq, const PacketSchedule& schedule,
                  const GapCertificate& cert, double wall_seconds) {
  Json j;
  j["kind"] = "congestion-report";
  j["version"] = 1;
  j["epsilon"] = schedule.epsilon;
  j["tol"] = cert.tol;
  j["k"] = rational_string(eq.k);
  j["rho_gcd"] = rational_string(schedule.rho_gcd_value);
  j["L"] = schedule.lipschitz;
  j["delta"] = rational_string(schedule.delta);
  j["predicted_packets"] = (schedule.delta / eq.k).ceil().str();
  j["resources"] = g.resource_names();
  j["profile"] = profile_json(eq.profile);
  j["gaps"] = gaps_json(cert);
  j["max_gap"] = cert.max_gap;
  j["best_response_count"] = eq.best_response_count;
  j["demand_increments"] = eq.demand_increments;
  j["wall_time_s"] = wall_seconds;
  return j;
}

Json cournot_report(const Oligopoly& o, const CournotSolution& sol, double wall_seconds) {
  Json j;
  j["kind"] = "cournot-report";
  j["version"] = 1;
  j["epsilon"] = sol.schedule.epsilon;
  j["tol"] = sol.certificate.tol;
  j["k"] = rational_string(sol.equilibrium.k);
  j["L"] = sol.schedule.lipschitz;
  j["delta"] = rational_string(sol.schedule.delta);
  j["markets"] = o.market_names();
  Json q = Json::array();
  Json qr = Json::array();
  for (const LoadVector& row : sol.quantities) {
    Json exact = Json::array();
    Json real = Json::array();
    for (const Rational& v : row) {
      exact.push_back(v.str());
      real.push_back(v.to_double());
    }
    q.push_back(std::move(exact));
    qr.push_back(std::move(real));
  }
  j["quantities"] = std::move(q);
  j["quantities_real"] = std::move(qr);
  j["gaps"] = gaps_json(sol.certificate);
  j["max_gap"] = sol.certificate.max_gap;
  j["best_response_count"] = sol.equilibrium.best_response_count;
  j["demand_increments"] = sol.equilibrium.demand_increments;
  j["wall_time_s"] = wall_seconds;
  return j;
}

Profile profile_from_report(const Game& g, const Json& report) {
  const std::string path = "$";
  Rational k = Rational::parse(get_string(member(report, path, "k"), path + ".k"));
  const Json& rows = member(report, path, "profile");
  if (!rows.is_array() || static_cast<int>(rows.size()) != g.num_players()) {
    fail(path + ".profile", "expected one load row per player");
  }
  std::vector<std::vector<std::int64_t>> counts(g.num_players(),
                                                std::vector<std::int64_t>(g.num_resources(), 0));
  for (int i = 0; i < g.num_players(); ++i) {
    const Json& row = rows[i];
    std::string rpath = path + ".profile[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != g.num_resources()) {
      fail(rpath, "expected one load per resource");
    }
    for (int e = 0; e < g.num_resources(); ++e) {
      Rational load = get_rational(row[e], rpath + "[" + std::to_string(e) + "]");
      Rational packets = load / k;
      if (!packets.is_integer() || packets.is_negative()) {
        fail(rpath + "[" + std::to_string(e) + "]",
             "load is not a nonnegative multiple of k");
      }
      counts[i][e] = packets.numerator().convert_to<std::int64_t>();
    }
  }
  return Profile::integral(k, std::move(counts));
}

BigInt work_estimate(const Game& g, const Rational& k) {
  BigInt packets = (g.max_demand() / k).ceil();
  return BigInt(g.num_players()) * BigInt(g.num_resources()) * packets * packets * packets;
}

}  // namespace congsolve

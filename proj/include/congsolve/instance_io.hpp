#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "congsolve/cournot.hpp"
#include "congsolve/integral_solver.hpp"

namespace congsolve {

using Json = nlohmann::ordered_json;

// Parsed instance file, either a congestion game or an oligopoly. Every
// validation failure names the offending JSON field.
struct Instance {
  std::variant<Game, Oligopoly> model;

  bool is_congestion() const { return std::holds_alternative<Game>(model); }
  const Game& game() const { return std::get<Game>(model); }
  const Oligopoly& oligopoly() const { return std::get<Oligopoly>(model); }
};

Instance parse_instance(const std::filesystem::path& path);
Instance parse_instance_json(const Json& root);

// Human-readable subset rendering ("{e1,e2}") used in diagnostics.
std::string subset_names(Subset u, const std::vector<std::string>& names);

// Report emission. Field order is fixed so identical runs serialize to
// identical bytes (only wall_time_s varies between runs).
Json solve_report(const Game& g, const EquilibriumResult& eq, const PacketSchedule& schedule,
                  const GapCertificate& cert, double wall_seconds);
Json certificate_json(const GapCertificate& cert);
Json cournot_report(const Oligopoly& o, const CournotSolution& sol, double wall_seconds);

// Reads the "k" and "profile" fields of a solve report back into a profile
// for re-verification.
Profile profile_from_report(const Game& g, const Json& report);

// Work estimate used by the CLI budget gate: n * m * (delta/k)^3.
BigInt work_estimate(const Game& g, const Rational& k);

}  // namespace congsolve

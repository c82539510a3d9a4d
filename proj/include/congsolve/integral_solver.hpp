#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "congsolve/game.hpp"
#include "congsolve/verify.hpp"

namespace congsolve {

// Strict marginal comparisons carry this deadband so binary64 cost noise
// cannot flip an exchange decision.
inline constexpr double kMarginalDeadband = 1e-12;

// Packet size schedule: k divides every rank value and every demand, and is
// small enough that the exact k-integral equilibrium is epsilon-approximate
// for the continuous game.
struct PacketSchedule {
  double epsilon = 0.0;
  Rational k;
  Rational rho_gcd_value;
  double lipschitz = 0.0;
  Rational delta;
  int num_resources = 0;
  BigInt divisor;  // exact integer the granularity is divided by (1 if degenerate)
};

PacketSchedule packet_size(const Game& g, double epsilon);

struct TraceEvent {
  enum class Kind { Place, Move };
  std::int64_t step = 0;
  Kind kind = Kind::Place;
  int player = 0;
  int to = 0;
  int from = -1;       // -1 for placements
  double gain = 0.0;   // placement: chosen packet cost; move: strict improvement
};

struct SolveOptions {
  std::function<void(const TraceEvent&)> on_event;  // optional dynamics trace
};

struct LocalViolation {
  int player = 0;
  int add_to = 0;
  int remove_from = 0;
};

struct EquilibriumResult {
  Profile profile;
  Rational k;
  std::int64_t best_response_count = 0;  // improving single-packet moves applied
  std::int64_t demand_increments = 0;    // packets added while raising demands
  bool certified_local_optimal = false;
};

// Raised when the dynamics exceed the iteration cap; carries the profile the
// solver had reached for diagnosis.
class NonTerminationError : public InternalError {
 public:
  NonTerminationError(const std::string& what, Profile last)
      : InternalError(what), last_profile(std::move(last)) {}
  Profile last_profile;
};

// Exact best response of one player against fixed opponent loads: greedy
// packet placement followed by largest-gain single-packet exchanges until no
// feasible exchange improves.
LoadVector best_response_k(const Game& g, const Rational& k, int player, const Profile& others);

// First (player, add_to, remove_from) triple, scanned in index order, where a
// feasible exchange strictly improves; nullopt certifies a k-integral
// equilibrium.
std::optional<LocalViolation> local_violation(const Game& g, const Rational& k,
                                              const Profile& x);

// Incremental packet dynamics: demands are raised one packet at a time
// (lowest player index first), each new packet is placed greedily, and local
// violations are repaired one packet per step until none remain.
EquilibriumResult solve_integral(const Game& g, const Rational& k,
                                 const SolveOptions& options = {});

struct ApproxResult {
  EquilibriumResult equilibrium;
  PacketSchedule schedule;
  GapCertificate certificate;
};

// Full pipeline: pick the packet size for epsilon, solve the k-integral game
// exactly, then certify the continuous gap (tolerance epsilon/100).
ApproxResult solve_approx(const Game& g, double epsilon);

}  // namespace congsolve

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congsolve/rational.hpp"

namespace congsolve {

// Subsets of the ground set {0, .., m-1} are bitmasks; bit e set means
// resource e is in the subset.
using Subset = std::uint64_t;

// Exact per-resource loads, indexed by ground-set order.
using LoadVector = std::vector<Rational>;

inline int subset_size(Subset u) { return std::popcount(u); }

// Monotone, submodular, normalized rank oracle. Two kinds are supported:
//   Simplex(A, r): rank r on any subset meeting A, 0 elsewhere. Scales to
//     wide ground sets (mask-width limited).
//   Table: explicit rank per subset; the table must be complete, which caps
//     the ground set at 20 resources.
class Polymatroid {
 public:
  enum class OracleKind { Simplex, Table };

  Polymatroid() = default;  // empty ground set

  static Polymatroid simplex(int ground_size, Subset allowed, Rational rank);
  static Polymatroid explicit_table(int ground_size, std::vector<Rational> table);

  int ground_size() const { return m_; }
  OracleKind kind() const { return kind_; }
  bool is_simplex() const { return kind_ == OracleKind::Simplex; }
  Subset full_mask() const;
  Subset allowed_mask() const { return allowed_; }            // simplex only
  const Rational& simplex_rank() const { return rank_; }      // simplex only
  const std::vector<Rational>& table() const { return table_; }

  Rational rank(Subset u) const;
  Rational rank_ground() const { return rank(full_mask()); }

  struct Violation {
    std::string axiom;  // "normalized" | "monotone" | "submodular"
    Subset u = 0;
    Subset v = 0;
  };
  // nullopt means the oracle satisfies all three polymatroid axioms. Table
  // oracles are checked through the single-element exchange characterization,
  // which is equivalent to the full quantifier; reported pairs are genuine
  // violating (U, V) pairs.
  std::optional<Violation> validate() const;

 private:
  OracleKind kind_ = OracleKind::Simplex;
  int m_ = 0;
  Subset allowed_ = 0;
  Rational rank_;
  std::vector<Rational> table_;
};

// Membership in the base polytope of rank d: x >= 0, x(U) <= rho(U) for all
// U, x(E) = d, all checked exactly. Throws InputError when d > rho(E).
bool is_in_base(const Polymatroid& p, const Rational& d, const LoadVector& x);

// Same constraints checked on binary64 loads with an additive tolerance per
// constraint. Used to vet continuous best-response witnesses.
bool is_in_base_within(const Polymatroid& p, const Rational& d,
                       std::span<const double> x, double tol);

// Largest alpha such that x + alpha*(chi_add - chi_remove) stays in the base
// polytope; 0 means no positive exchange exists. Requires x in the base
// polytope and add_to != remove_from.
Rational exchange_capacity(const Polymatroid& p, const Rational& d, const LoadVector& x,
                           int add_to, int remove_from);

// Vertex of the base polytope minimizing sum_e w_e x_e: resources are scanned
// by ascending weight (ties by index) and each receives its rank increment
// until d is exhausted.
LoadVector greedy_linear_min(const Polymatroid& p, const Rational& d,
                             std::span<const double> weights);

// Largest rational a <= 1 such that every (skipped: zero) input is an integer
// multiple of a; 1 when the effective list is empty.
Rational rho_gcd(std::span<const Rational> values);

// Nonzero rank values of the oracle, for common-granularity computations.
std::vector<Rational> rank_values(const Polymatroid& p);

}  // namespace congsolve

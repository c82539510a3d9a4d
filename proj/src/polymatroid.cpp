#include "congsolve/polymatroid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace congsolve {

namespace {

constexpr int kMaxTableGround = 20;
constexpr int kMaxMaskGround = 63;

void check_resource(const Polymatroid& p, int e, const char* what) {
  if (e < 0 || e >= p.ground_size()) {
    throw InputError(std::string(what) + ": resource index out of range");
  }
}

void check_subset(const Polymatroid& p, Subset u) {
  if (p.ground_size() >= 64) return;
  if ((u & ~p.full_mask()) != 0) {
    throw InputError("subset mentions a resource outside the ground set");
  }
}

}  // namespace

Subset Polymatroid::full_mask() const {
  return m_ == 64 ? ~Subset{0} : ((Subset{1} << m_) - 1);
}

Polymatroid Polymatroid::simplex(int ground_size, Subset allowed, Rational rank) {
  if (ground_size < 0 || ground_size > kMaxMaskGround) {
    throw InputError("simplex oracle: ground set size out of range");
  }
  Polymatroid p;
  p.kind_ = OracleKind::Simplex;
  p.m_ = ground_size;
  p.allowed_ = allowed;
  p.rank_ = std::move(rank);
  check_subset(p, allowed);
  if (p.rank_.is_negative()) {
    throw InputError("simplex oracle: negative rank");
  }
  return p;
}

Polymatroid Polymatroid::explicit_table(int ground_size, std::vector<Rational> table) {
  if (ground_size < 0 || ground_size > kMaxTableGround) {
    throw InputError("table oracle: ground set size out of range (max 20)");
  }
  Polymatroid p;
  p.kind_ = OracleKind::Table;
  p.m_ = ground_size;
  p.table_ = std::move(table);
  if (p.table_.size() != (std::size_t{1} << ground_size)) {
    throw InputError("table oracle: incomplete rank table");
  }
  return p;
}

Rational Polymatroid::rank(Subset u) const {
  check_subset(*this, u);
  if (kind_ == OracleKind::Simplex) {
    return (u & allowed_) != 0 ? rank_ : Rational(0);
  }
  return table_[u];
}

std::optional<Polymatroid::Violation> Polymatroid::validate() const {
  if (kind_ == OracleKind::Simplex) {
    return std::nullopt;  // holds by construction
  }
  if (table_[0] != Rational(0)) {
    return Violation{"normalized", 0, 0};
  }
  Subset full = full_mask();
  for (Subset u = 0; u <= full; ++u) {
    for (int e = 0; e < m_; ++e) {
      if (u & (Subset{1} << e)) continue;
      Subset ue = u | (Subset{1} << e);
      if (table_[u] > table_[ue]) {
        return Violation{"monotone", u, ue};
      }
      for (int f = e + 1; f < m_; ++f) {
        if (u & (Subset{1} << f)) continue;
        Subset uf = u | (Subset{1} << f);
        Subset uef = ue | (Subset{1} << f);
        if (table_[ue] + table_[uf] < table_[uef] + table_[u]) {
          return Violation{"submodular", ue, uf};
        }
      }
    }
  }
  return std::nullopt;
}

bool is_in_base(const Polymatroid& p, const Rational& d, const LoadVector& x) {
  if (static_cast<int>(x.size()) != p.ground_size()) {
    throw InputError("load vector size does not match ground set");
  }
  if (d > p.rank_ground()) {
    throw InputError("demand exceeds the rank of the ground set");
  }
  Rational total;
  for (const Rational& v : x) {
    if (v.is_negative()) return false;
    total += v;
  }
  if (total != d) return false;
  if (p.is_simplex()) {
    for (int e = 0; e < p.ground_size(); ++e) {
      if (!(p.allowed_mask() & (Subset{1} << e)) && !x[e].is_zero()) return false;
    }
    return true;  // x(A) = d <= rank already established
  }
  Subset full = p.full_mask();
  for (Subset u = 1; u <= full; ++u) {
    Rational sum;
    for (int e = 0; e < p.ground_size(); ++e) {
      if (u & (Subset{1} << e)) sum += x[e];
    }
    if (sum > p.rank(u)) return false;
  }
  return true;
}

bool is_in_base_within(const Polymatroid& p, const Rational& d,
                       std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != p.ground_size()) {
    throw InputError("load vector size does not match ground set");
  }
  if (d > p.rank_ground()) return false;
  double total = 0.0;
  for (double v : x) {
    if (v < -tol) return false;
    total += v;
  }
  if (std::abs(total - d.to_double()) > tol) return false;
  if (p.is_simplex()) {
    double off_allowed = 0.0;
    for (int e = 0; e < p.ground_size(); ++e) {
      if (!(p.allowed_mask() & (Subset{1} << e))) off_allowed += std::max(x[e], 0.0);
    }
    return off_allowed <= tol;
  }
  Subset full = p.full_mask();
  for (Subset u = 1; u <= full; ++u) {
    double sum = 0.0;
    for (int e = 0; e < p.ground_size(); ++e) {
      if (u & (Subset{1} << e)) sum += x[e];
    }
    if (sum > p.rank(u).to_double() + tol) return false;
  }
  return true;
}

Rational exchange_capacity(const Polymatroid& p, const Rational& d, const LoadVector& x,
                           int add_to, int remove_from) {
  check_resource(p, add_to, "exchange_capacity");
  check_resource(p, remove_from, "exchange_capacity");
  if (add_to == remove_from) {
    throw InputError("exchange_capacity: resources must differ");
  }
  (void)d;
  if (p.is_simplex()) {
    if (p.allowed_mask() & (Subset{1} << add_to)) return x[remove_from];
    return Rational(0);
  }
  Rational cap = x[remove_from];
  Subset full = p.full_mask();
  for (Subset u = 1; u <= full; ++u) {
    if (!(u & (Subset{1} << add_to)) || (u & (Subset{1} << remove_from))) continue;
    Rational sum;
    for (int e = 0; e < p.ground_size(); ++e) {
      if (u & (Subset{1} << e)) sum += x[e];
    }
    Rational slack = p.rank(u) - sum;
    if (slack < cap) cap = slack;
  }
  return cap;
}

LoadVector greedy_linear_min(const Polymatroid& p, const Rational& d,
                             std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != p.ground_size()) {
    throw InputError("weight vector size does not match ground set");
  }
  for (double w : weights) {
    if (std::isnan(w)) throw InputError("greedy_linear_min: NaN weight");
  }
  if (d > p.rank_ground()) {
    throw InputError("demand exceeds the rank of the ground set");
  }
  std::vector<int> order(p.ground_size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] < weights[b];
    return a < b;
  });
  LoadVector x(p.ground_size());
  Rational assigned;
  Subset prefix = 0;
  Rational prev_rank;
  for (int e : order) {
    if (assigned == d) break;
    prefix |= Subset{1} << e;
    Rational r = p.rank(prefix);
    Rational inc = r - prev_rank;
    prev_rank = r;
    Rational remaining = d - assigned;
    if (remaining < inc) inc = remaining;
    x[e] = inc;
    assigned += inc;
  }
  return x;
}

Rational rho_gcd(std::span<const Rational> values) {
  Rational g;
  bool any = false;
  for (const Rational& v : values) {
    if (v.is_zero()) continue;  // every a divides 0
    if (v.is_negative()) throw InputError("rho_gcd: negative value");
    g = any ? Rational::gcd(g, v) : v;
    any = true;
  }
  if (!any) return Rational(1);
  if (g <= Rational(1)) return g;
  // Largest divisor of g not exceeding 1 is g / ceil(g).
  return g / Rational(g.ceil());
}

std::vector<Rational> rank_values(const Polymatroid& p) {
  std::vector<Rational> values;
  if (p.is_simplex()) {
    if (p.simplex_rank().is_positive() && p.allowed_mask() != 0) {
      values.push_back(p.simplex_rank());
    }
    return values;
  }
  for (const Rational& v : p.table()) {
    if (!v.is_zero()) values.push_back(v);
  }
  return values;
}

}  // namespace congsolve

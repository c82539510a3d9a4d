#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "congsolve/errors.hpp"

namespace congsolve {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational arithmetic on arbitrary-precision integers. Values are kept
// canonical (gcd-reduced, positive denominator) and no operation ever rounds.
class Rational {
 public:
  Rational() = default;
  Rational(long long value) : num_(value) {}  // NOLINT: implicit on purpose
  explicit Rational(BigInt value) : num_(std::move(value)) {}
  Rational(BigInt numerator, BigInt denominator);
  Rational(long long numerator, long long denominator)
      : Rational(BigInt(numerator), BigInt(denominator)) {}

  // Accepts "p", "-p" or "p/q" with integer p, q.
  static Rational parse(std::string_view text);
  // Exact value of a finite binary64 number.
  static Rational from_double(double value);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_integer() const { return den_ == 1; }

  BigInt floor() const;
  BigInt ceil() const;
  double to_double() const;
  std::string str() const;

  // Largest rational dividing both arguments (integer-quotient sense).
  static Rational gcd(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  friend Rational operator-(const Rational& value) {
    Rational r = value;
    r.num_ = -r.num_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  void normalize();

  BigInt num_{0};
  BigInt den_{1};
};

}  // namespace congsolve

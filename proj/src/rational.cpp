#include "congsolve/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace congsolve {

namespace {

BigInt big_gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

}  // namespace

Rational::Rational(BigInt numerator, BigInt denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_ == 0) {
    throw InputError("rational with zero denominator");
  }
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  BigInt g = big_gcd(boost::multiprecision::abs(num_), den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::parse(std::string_view text) {
  auto bad = [&]() -> InputError {
    return InputError("malformed rational '" + std::string(text) + "'");
  };
  auto parse_int = [&](std::string_view s) -> BigInt {
    if (s.empty()) throw bad();
    std::size_t start = 0;
    if (s[0] == '-' || s[0] == '+') start = 1;
    if (start == s.size()) throw bad();
    for (std::size_t i = start; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw bad();
    }
    return BigInt(std::string(s));
  };
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_int(text));
  }
  BigInt num = parse_int(text.substr(0, slash));
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) throw bad();
  BigInt den = parse_int(den_text);
  if (den == 0) throw bad();
  return Rational(std::move(num), std::move(den));
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) {
    throw InputError("cannot convert non-finite double to rational");
  }
  if (value == 0.0) return Rational();
  int exp = 0;
  double mantissa = std::frexp(value, &exp);
  // 53 bits of significand; ldexp is exact here.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exp -= 53;
  BigInt num(scaled);
  if (exp >= 0) {
    return Rational(num << exp);
  }
  return Rational(std::move(num), BigInt(1) << -exp);
}

BigInt Rational::floor() const {
  if (num_ >= 0) return num_ / den_;
  return -((-num_ + den_ - 1) / den_);
}

BigInt Rational::ceil() const {
  if (num_ > 0) return (num_ + den_ - 1) / den_;
  return -((-num_) / den_);
}

double Rational::to_double() const {
  boost::multiprecision::cpp_rational r(num_, den_);
  return r.convert_to<double>();
}

std::string Rational::str() const {
  std::string s = num_.str();
  if (den_ != 1) {
    s += "/";
    s += den_.str();
  }
  return s;
}

Rational Rational::gcd(const Rational& a, const Rational& b) {
  if (a.is_zero()) return b.is_negative() ? -b : b;
  if (b.is_zero()) return a.is_negative() ? -a : a;
  BigInt num = big_gcd(boost::multiprecision::abs(a.num_ * b.den_),
                       boost::multiprecision::abs(b.num_ * a.den_));
  return Rational(std::move(num), a.den_ * b.den_);
}

Rational& Rational::operator+=(const Rational& rhs) {
  num_ = num_ * rhs.den_ + rhs.num_ * den_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  num_ = num_ * rhs.den_ - rhs.num_ * den_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  num_ *= rhs.num_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) {
    throw InputError("rational division by zero");
  }
  num_ *= rhs.den_;
  den_ *= rhs.num_;
  normalize();
  return *this;
}

}  // namespace congsolve

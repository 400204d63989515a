#pragma once

// Small exact rationals for valuation bookkeeping.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace prymtau {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw std::domain_error("zero denominator");
    normalize();
  }
  void normalize() {
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  Rational operator-() const { return {-num, den}; }
  Rational& operator+=(Rational b) { return *this = *this + b; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend bool operator>=(Rational a, Rational b) { return !(a < b); }
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend std::ostream& operator<<(std::ostream& os, Rational r) {
    return r.den == 1 ? os << r.num : os << r.num << '/' << r.den;
  }
};

inline Rational min(Rational a, Rational b) { return b < a ? b : a; }

}  // namespace prymtau

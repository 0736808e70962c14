#pragma once

// Exact rational arithmetic for the Lebesgue exponents of the inequality
// family, with the convexity identities verified at construction.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlw/geometry.hpp"

namespace hlw {

struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n) : num(n), den(1) {}
  Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rat operator+(Rat a, Rat b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator/(Rat a, Rat b) {
    if (b.num == 0) throw std::invalid_argument("Rat: division by zero");
    return Rat(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(Rat a, Rat b) { return !(a == b); }

  Rat reciprocal() const { return Rat(den, num); }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

// Exponents of the strong-type bound and its vertex endpoints:
//   p_main = n(2n+1)/(n+1)          shared exponent of the 2n factors
//   q_dual = n(2n+1)/(2n^2-1)       dual of p_main
//   q_k    = (2n+1)/2n (k<n), (2n+1)/(2n-1) (k=n)
//   p_jk   = (2n+1)/2 when k hits the pair {j, j+n, j-n}, else 2n+1
struct ExponentTable {
  HDim dim;
  Rat p_main;
  Rat q_dual;
  std::vector<Rat> q_k;                // n entries
  std::vector<std::vector<Rat>> p_jk;  // (2n-1) x n

  // 1/q_dual = (1/n) sum_k 1/q_k and 1/p_main = (1/n) sum_k 1/p_jk, exactly.
  bool identities_hold() const;
};

ExponentTable exponent_table(HDim dim);

}  // namespace hlw

#pragma once

// Elementary number theory and F2 linear algebra used across the library.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlc {

using i64 = std::int64_t;

class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-negative remainder.
constexpr i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

constexpr i64 ipow(i64 b, int e) {
  i64 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

constexpr bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Prime factorization as (prime, exponent) pairs in increasing prime order.
inline std::vector<std::pair<i64, int>> factor(i64 n) {
  std::vector<std::pair<i64, int>> out;
  if (n < 0) n = -n;
  for (i64 p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> out;
  for (auto [p, e] : factor(n)) out.push_back(p);
  return out;
}

/// p-adic valuation of a nonzero integer.
constexpr int valuation(i64 n, i64 p) {
  if (n == 0) throw ArithmeticError("valuation of zero");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// n with all factors p removed.
constexpr i64 strip(i64 n, i64 p) {
  if (n == 0) throw ArithmeticError("strip of zero");
  while (n % p == 0) n /= p;
  return n;
}

/// Modular inverse of a modulo m (gcd must be 1).
inline i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, r = mod(a, m);
  while (r != 0) {
    i64 q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw ArithmeticError("no inverse of " + std::to_string(a) + " mod " + std::to_string(m));
  return mod(x, m);
}

/// Legendre symbol (a/p) for odd prime p; a must be prime to p.
inline int legendre(i64 a, i64 p) {
  a = mod(a, p);
  if (a == 0) throw ArithmeticError("legendre symbol of multiple of p");
  i64 r = 1, b = a, e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) r = (r * b) % p;
    b = (b * b) % p;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

/// Square class of a p-adic unit, as an element of Z_p^x/(Z_p^x)^2.
/// Odd p: +1 or -1 (the Legendre symbol). p = 2: the residue mod 8 in {1,3,5,7}.
inline int unit_class(i64 u, i64 p) {
  if (u % p == 0) throw ArithmeticError("unit_class of non-unit");
  if (p == 2) return static_cast<int>(mod(u, 8));
  return legendre(u, p);
}

/// The character chi_p on unit square classes: Legendre symbol, or u mod 4 for p = 2.
inline int chi(i64 u, i64 p) {
  if (p == 2) return mod(u, 4) == 1 ? 1 : -1;
  return legendre(u, p);
}

/// Value in Q/2Z stored as a reduced fraction num/den with 0 <= num < 2*den.
class Residue2 {
 public:
  constexpr Residue2() = default;
  Residue2(i64 num, i64 den) {
    if (den <= 0) throw ArithmeticError("Residue2 denominator must be positive");
    i64 g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
    num_ = mod(num_, 2 * den_);
    if (num_ == 0) den_ = 1;
  }

  i64 num() const { return num_; }
  i64 den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  /// True when the value lies in Z/2Z.
  bool is_integral() const { return den_ == 1; }

  friend Residue2 operator+(Residue2 a, Residue2 b) {
    i64 l = std::lcm(a.den_, b.den_);
    return {a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l};
  }
  friend Residue2 operator-(Residue2 a) { return {-a.num_, a.den_}; }
  friend Residue2 operator-(Residue2 a, Residue2 b) { return a + (-b); }
  friend Residue2 operator*(i64 k, Residue2 a) { return {mod(k, 2 * a.den_) * a.num_, a.den_}; }
  friend bool operator==(const Residue2&, const Residue2&) = default;
  friend auto operator<=>(const Residue2&, const Residue2&) = default;

  /// Reduction to Q/Z, as a fraction in [0,1).
  std::pair<i64, i64> mod1() const {
    i64 n = mod(num_, den_);
    if (n == 0) return {0, 1};
    i64 g = std::gcd(n, den_);
    return {n / g, den_ / g};
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  i64 num_ = 0;
  i64 den_ = 1;
};

/// Product a*b in Q/Z (a, b reduced fractions); helper for bilinear values.
inline std::pair<i64, i64> mod1_of(i64 num, i64 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i64 g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  num /= g;
  den /= g;
  return {mod(num, den), den};
}

// ---------------------------------------------------------------------------
// F2 linear algebra. Vectors are bitmasks over at most 64 coordinates.

using F2Vec = std::uint64_t;

/// Incremental row-echelon basis over F2.
class F2Span {
 public:
  /// Adds v; returns true if it enlarged the span.
  bool add(F2Vec v) {
    v = reduce(v);
    if (v == 0) return false;
    int lead = 63 - __builtin_clzll(v);
    for (auto& r : rows_)
      if ((r >> lead) & 1u) r ^= v;
    rows_.push_back(v);
    return true;
  }
  F2Vec reduce(F2Vec v) const {
    for (F2Vec r : rows_) {
      int lead = 63 - __builtin_clzll(r);
      if ((v >> lead) & 1u) v ^= r;
    }
    return v;
  }
  bool contains(F2Vec v) const { return reduce(v) == 0; }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::vector<F2Vec>& rows() const { return rows_; }

 private:
  std::vector<F2Vec> rows_;
};

inline int f2_rank(const std::vector<F2Vec>& rows) {
  F2Span s;
  for (F2Vec r : rows) s.add(r);
  return s.rank();
}

}  // namespace qlc

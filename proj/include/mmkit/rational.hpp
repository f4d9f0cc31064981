#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mmkit/errors.hpp"

namespace mmkit {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar. Stored in canonical reduced form (positive
/// denominator, gcd 1); all arithmetic and comparisons are exact. There are
/// no tolerances anywhere in the toolkit: every inequality that appears in a
/// certificate is decided on values of this type.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}                // NOLINT: implicit by design
  Rat(long long n) : v_(n) {}          // NOLINT
  explicit Rat(const BigInt& n) : v_(n) {}

  Rat(long long num, long long den) : Rat(BigInt(num), BigInt(den)) {}

  Rat(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    v_ = Q(num);
    v_ /= Q(den);
  }

  /// Parses "n" or "p/q" with an optional leading sign on the numerator.
  /// Returns nullopt on any other shape (including "1/0").
  static std::optional<Rat> parse(std::string_view s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      neg = s[i] == '-';
      ++i;
    }
    std::size_t num_begin = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == num_begin) return std::nullopt;
    BigInt num(std::string(s.substr(num_begin, i - num_begin)));
    BigInt den = 1;
    if (i < s.size()) {
      if (s[i] != '/') return std::nullopt;
      ++i;
      std::size_t den_begin = i;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
      if (i == den_begin || i != s.size()) return std::nullopt;
      den = BigInt(std::string(s.substr(den_begin, i - den_begin)));
      if (den == 0) return std::nullopt;
    }
    if (neg) num = -num;
    return Rat(num, den);
  }

  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }

  bool is_zero() const { return v_.is_zero(); }
  bool is_integer() const { return denominator() == 1; }
  int sign() const { return v_.sign(); }

  Rat operator-() const { return Rat(Q(-v_)); }

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Canonical text form: "p" when the value is an integer, else "p/q".
  std::string to_string() const {
    std::string s = numerator().str();
    if (!is_integer()) {
      s += '/';
      s += denominator().str();
    }
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.to_string();
  }

 private:
  using Q = boost::multiprecision::cpp_rational;
  explicit Rat(Q v) : v_(std::move(v)) {}
  Q v_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

using RatVec = std::vector<Rat>;
using RatMatrix = std::vector<RatVec>;

inline Rat sum(const RatVec& v) {
  Rat s;
  for (const Rat& x : v) s += x;
  return s;
}

/// Least common multiple of the denominators of a range of rationals.
/// This is the exact integer scale used by the max-flow kernel.
inline BigInt common_denominator(const RatVec& v) {
  BigInt l = 1;
  for (const Rat& x : v) l = boost::multiprecision::lcm(l, x.denominator());
  return l;
}

}  // namespace mmkit

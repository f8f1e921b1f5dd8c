#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace relqm {

/// Exact rational number with a canonical sign convention (den > 0, gcd-reduced).
///
/// Backed by int64 numerator/denominator with 128-bit intermediates; arithmetic
/// that would leave the representable range throws instead of wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    __int128 n = num;
    __int128 d = den;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    normalize_assign(n, d);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator-(const Rational& r) {
    Rational out;
    out.num_ = -r.num_;
    out.den_ = r.den_;
    return out;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational out;
    out.normalize_assign(static_cast<__int128>(a.num_) * b.den_ +
                             static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    return out;
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational out;
    out.normalize_assign(static_cast<__int128>(a.num_) * b.num_,
                         static_cast<__int128>(a.den_) * b.den_);
    return out;
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    Rational out;
    out.normalize_assign(n, d);
    return out;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize_assign(__int128 n, __int128 d) {
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    __int128 g = gcd128(n, d);
    n /= g;
    d /= g;
    constexpr __int128 lo = INT64_MIN;
    constexpr __int128 hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw std::overflow_error("Rational: value outside 64-bit range");
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
  }

  std::int64_t num_;
  std::int64_t den_;
};

/// Gaussian rational a + b*i, the coefficient scalar of the operator algebra.
struct GaussRational {
  Rational re;
  Rational im;

  constexpr GaussRational() = default;
  GaussRational(Rational real) : re(real) {}
  GaussRational(Rational real, Rational imag) : re(real), im(imag) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  static GaussRational i() { return GaussRational(Rational(0), Rational(1)); }

  friend GaussRational operator-(const GaussRational& z) {
    return {-z.re, -z.im};
  }
  friend GaussRational operator+(const GaussRational& a,
                                 const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a,
                                 const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator*(const GaussRational& a,
                                 const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussRational& operator+=(const GaussRational& o) {
    return *this = *this + o;
  }
  GaussRational& operator-=(const GaussRational& o) {
    return *this = *this - o;
  }
  GaussRational& operator*=(const GaussRational& o) {
    return *this = *this * o;
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) {
    return !(a == b);
  }

  std::string to_string() const {
    if (im.is_zero()) return re.to_string();
    if (re.is_zero()) return im.to_string() + "*i";
    return "(" + re.to_string() + (im.is_negative() ? "" : "+") +
           im.to_string() + "*i)";
  }
};

}  // namespace relqm

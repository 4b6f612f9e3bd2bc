#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>

#include "fairx/errors.hpp"

namespace fairx {

// Exact rational arithmetic on 128-bit integers. Used once per run to derive
// the solver's threshold table from (epsilon, n, L) without intermediate
// rounding; every double is dyadic, so from_double is exact.
class Rational {
 public:
  Rational() = default;
  Rational(long long num, long long den) : num_(num), den_(den) { normalize(); }

  static Rational from_int(long long v) { return Rational(v, 1); }

  static Rational from_double(double v) {
    if (!std::isfinite(v)) throw InputError("rational: non-finite value");
    if (v == 0.0) return Rational(0, 1);
    int exp = 0;
    double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    auto m = static_cast<__int128>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r;
    r.num_ = m;
    r.den_ = 1;
    if (exp >= 0) {
      for (int i = 0; i < exp; ++i) r.num_ = checked_mul(r.num_, 2);
    } else {
      for (int i = 0; i < -exp; ++i) r.den_ = checked_mul(r.den_, 2);
    }
    r.normalize();
    return r;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator*(const Rational& o) const {
    // Cross-reduce before multiplying to keep magnitudes small.
    __int128 g1 = gcd128(abs128(num_), o.den_);
    __int128 g2 = gcd128(abs128(o.num_), den_);
    Rational r;
    r.num_ = checked_mul(num_ / g1, o.num_ / g2);
    r.den_ = checked_mul(den_ / g2, o.den_ / g1);
    r.normalize();
    return r;
  }

  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw InputError("rational: division by zero");
    Rational inv;
    inv.num_ = o.den_;
    inv.den_ = o.num_;
    if (inv.den_ < 0) {
      inv.num_ = -inv.num_;
      inv.den_ = -inv.den_;
    }
    return *this * inv;
  }

  Rational operator+(const Rational& o) const {
    __int128 g = gcd128(den_, o.den_);
    Rational r;
    r.num_ = checked_add(checked_mul(num_, o.den_ / g), checked_mul(o.num_, den_ / g));
    r.den_ = checked_mul(den_ / g, o.den_);
    r.normalize();
    return r;
  }

  Rational operator-(const Rational& o) const {
    Rational neg;
    neg.num_ = -o.num_;
    neg.den_ = o.den_;
    return *this + neg;
  }

  bool operator<(const Rational& o) const {
    // den_ > 0 always; safe cross-multiplication after reduction.
    __int128 g = gcd128(den_, o.den_);
    return checked_mul(num_, o.den_ / g) < checked_mul(o.num_, den_ / g);
  }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }

  Rational ceil_div_as_int() const {
    // ceil(num/den) as a rational integer; num_ >= 0 expected.
    __int128 q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) q += 1;
    Rational r;
    r.num_ = q;
    r.den_ = 1;
    return r;
  }

 private:
  __int128 num_ = 0;
  __int128 den_ = 1;

  static __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

  static __int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static __int128 checked_mul(__int128 a, __int128 b) {
    if (a == 0 || b == 0) return 0;
    __int128 r = a * b;
    if (r / b != a) throw InvariantError("rational: 128-bit overflow in multiply");
    return r;
  }

  static __int128 checked_add(__int128 a, __int128 b) {
    __int128 r = a + b;
    if ((a > 0 && b > 0 && r < 0) || (a < 0 && b < 0 && r > 0))
      throw InvariantError("rational: 128-bit overflow in add");
    return r;
  }

  void normalize() {
    if (den_ == 0) throw InputError("rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    __int128 g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }
};

}  // namespace fairx

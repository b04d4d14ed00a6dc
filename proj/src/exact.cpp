// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "guarddiv/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace guarddiv::exact {

namespace {

constexpr int kSignificandBits = 53;
constexpr long kMinExponent = -1074;  // exponent of the least subnormal
constexpr long kMaxExponent = 971;    // 2^971 * (2^53 - 1) == DBL_MAX

long bit_length(const mpz_class& v) {
  return static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

// floor(a / (b * 2^e)) and the remainder scaled to the same denominator.
void scaled_divmod(const mpz_class& a, const mpz_class& b, long e,
                   mpz_class& quotient, mpz_class& remainder,
                   mpz_class& divisor) {
  mpz_class num = a;
  divisor = b;
  if (e >= 0) {
    mpz_mul_2exp(divisor.get_mpz_t(), divisor.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(-e));
  }
  mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), num.get_mpz_t(),
              divisor.get_mpz_t());
}

}  // namespace

Rational from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("exact::from_double: non-finite input");
  }
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);  // exact for every finite double
  return r;
}

double to_double(const Rational& value) {
  const int s = sgn(value);
  if (s == 0) {
    return 0.0;
  }
  const mpz_class a = abs(value.get_num());
  const mpz_class& b = value.get_den();

  // Pick e with 2^52 <= a / (b 2^e) < 2^53, then clamp into the subnormal
  // range where the significand is allowed to be short.
  long e = bit_length(a) - bit_length(b) - kSignificandBits;
  mpz_class q, rem, div;
  scaled_divmod(a, b, e, q, rem, div);
  const mpz_class lo = mpz_class(1) << (kSignificandBits - 1);
  const mpz_class hi = mpz_class(1) << kSignificandBits;
  if (q >= hi) {
    ++e;
    scaled_divmod(a, b, e, q, rem, div);
  } else if (q < lo) {
    --e;
    scaled_divmod(a, b, e, q, rem, div);
  }
  if (e < kMinExponent) {
    e = kMinExponent;
    scaled_divmod(a, b, e, q, rem, div);
  }

  const int cmp_half = cmp(rem * 2, div);
  if (cmp_half > 0 || (cmp_half == 0 && mpz_odd_p(q.get_mpz_t()))) {
    ++q;
  }
  if (q == hi) {
    q = lo;
    ++e;
  }
  if (e > kMaxExponent) {
    return s * std::numeric_limits<double>::infinity();
  }
  const double magnitude = std::ldexp(q.get_d(), static_cast<int>(e));
  return s < 0 ? -magnitude : magnitude;
}

bool is_representable(const Rational& value) {
  const double d = to_double(value);
  return std::isfinite(d) && from_double(d) == value;
}

Rational pow(const Rational& base, int exponent) {
  if (exponent < 0) {
    return Rational(1) / pow(base, -exponent);
  }
  Rational result(1);
  for (int i = 0; i < exponent; ++i) {
    result *= base;
  }
  return result;
}

}  // namespace guarddiv::exact

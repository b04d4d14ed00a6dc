// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Exact rational arithmetic on binary64 values.
//
// Every finite double is a dyadic rational, so GMP rationals represent
// forward values, constants and their exact sums and products with no
// error. Rendering back to binary64 rounds once, to nearest, ties to even.
//
// mpq_class carries no shared mutable state; these helpers are safe to
// call concurrently from OpenMP workers.

#include <gmpxx.h>

namespace guarddiv::exact {

using Rational = mpq_class;

/// Exact rational value of a finite double. Throws std::domain_error for
/// NaN and infinities.
Rational from_double(double value);

/// Nearest binary64 to `value`, ties to even. Magnitudes past the largest
/// finite double round to infinity; tiny magnitudes go through the
/// subnormal range to signed zero.
double to_double(const Rational& value);

/// True when `value` is exactly representable as a binary64.
bool is_representable(const Rational& value);

/// Exact integer power.
Rational pow(const Rational& base, int exponent);

}  // namespace guarddiv::exact

// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// The quotient family (x^p - 2^p) / (x - 2) with a removable singularity at
// x = 2, its simplified form, and four epsilon-guarded variants.
//
//   H        f/g
//   H_EXACT  the simplified polynomial (x + 2 for p = 2)
//   H1       f/(g + S(g) eps)       when 2 - delta < x < 2 + delta, else f/g
//   H1_HAT   f/(S(g) eps)           when 2 - delta < x < 2 + delta, else f/g
//   H2       f/(S(g) eps)           when |g| < eps, else f/g
//   H2_HAT   f/(-eps) on -eps < g < 0, f/eps on 0 < g < eps, else f/g
//
// with f = x^p - 2^p and g = x - 2 built as separate subgraphs.

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "guarddiv/exact.hpp"
#include "guarddiv/tape.hpp"

namespace guarddiv::fn {

enum class FunctionKind { H, HExact, H1, H1Hat, H2, H2Hat };

inline constexpr std::array<FunctionKind, 6> kAllKinds = {
    FunctionKind::H,  FunctionKind::HExact, FunctionKind::H1,
    FunctionKind::H1Hat, FunctionKind::H2, FunctionKind::H2Hat};

std::string_view to_string(FunctionKind kind);
std::optional<FunctionKind> parse_kind(std::string_view name);

constexpr bool is_guarded(FunctionKind kind) {
  return kind != FunctionKind::H && kind != FunctionKind::HExact;
}

struct GuardConfig {
  double epsilon = 1e-8;
  double delta = 1e-4;
  /// S(0). H2_HAT also uses it to route g == 0 to the +eps or -eps branch.
  ad::Sign sign_at_zero = ad::Sign::Positive;
  int numerator_power = 2;

  /// Throws std::invalid_argument unless eps > 0, delta > 0 and p is 2 or 3.
  void validate() const;

  /// How far the window edges are from making H1_HAT continuous:
  /// max over both edges of | |fl(2 +- delta) - 2| - eps |. Zero when the
  /// window edges land exactly where |g| == eps.
  double continuity_gap() const;

  bool operator==(const GuardConfig&) const = default;
};

/// Records the function on `tape` with `x` as its argument and returns the
/// output node.
ad::Var build(FunctionKind kind, const GuardConfig& cfg, ad::Tape& tape,
              ad::Var x);

struct Evaluation {
  double value;
  double grad;
};

/// Fresh tape, one forward pass, one reverse sweep.
Evaluation evaluate(FunctionKind kind, const GuardConfig& cfg, double x);

/// Forward pass only.
double forward_value(FunctionKind kind, const GuardConfig& cfg, double x);

/// Raised by analytic_value() where the formula as written divides 0 by 0.
class RemovableSingularity : public std::domain_error {
 public:
  explicit RemovableSingularity(exact::Rational limit);
  const exact::Rational& limit() const { return limit_; }

 private:
  exact::Rational limit_;
};

/// The function evaluated in exact arithmetic at the real number `x`
/// denotes. eps and delta enter as the exact values of their doubles.
exact::Rational analytic_value(FunctionKind kind, const GuardConfig& cfg,
                               double x);

/// Exact derivative of the simplified polynomial at `x` (1 for p = 2).
exact::Rational simplified_derivative(int power, double x);

/// The two rounding losses that drive the degenerate derivatives.
struct UnderflowFlags {
  /// fl(x^p) kept only the constant and linear terms of its expansion.
  bool numerator_lost = false;
  /// fl(2 + gamma) == 2.
  bool denominator_lost = false;

  bool operator==(const UnderflowFlags&) const = default;
};

UnderflowFlags observe_underflow(double gamma, int power);

/// Closed-form prediction of what backprop returns at x = fl(2 + gamma).
/// Throws std::invalid_argument when `flags` disagree with what binary64
/// arithmetic does at `gamma`. Returns NaN where the prediction is NaN.
double predicted_backprop(FunctionKind kind, const GuardConfig& cfg,
                          double gamma, UnderflowFlags flags);

}  // namespace guarddiv::fn

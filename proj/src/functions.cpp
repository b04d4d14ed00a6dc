// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "guarddiv/functions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace guarddiv::fn {

using exact::Rational;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double two_to(int p) { return std::ldexp(1.0, p); }

// Binary64 predicates that pick the guarded branch. They look only at
// forward values, the way host-language control flow would.
bool in_window(const GuardConfig& cfg, double x) {
  const double lo = 2.0 - cfg.delta;
  const double hi = 2.0 + cfg.delta;
  return lo < x && x < hi;
}

bool in_band(const GuardConfig& cfg, double g) {
  return std::fabs(g) < cfg.epsilon;
}

int sign_of(const Rational& v, ad::Sign at_zero) {
  const int s = sgn(v);
  return s == 0 ? static_cast<int>(at_zero) : s;
}

// d/dx x^p, exactly.
Rational power_partial(int p, const Rational& x) {
  return Rational(p) * exact::pow(x, p - 1);
}

}  // namespace

std::string_view to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::H: return "H";
    case FunctionKind::HExact: return "H_EXACT";
    case FunctionKind::H1: return "H1";
    case FunctionKind::H1Hat: return "H1_HAT";
    case FunctionKind::H2: return "H2";
    case FunctionKind::H2Hat: return "H2_HAT";
  }
  return "?";
}

std::optional<FunctionKind> parse_kind(std::string_view name) {
  for (FunctionKind k : kAllKinds) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

void GuardConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive and finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("delta must be positive and finite");
  }
  if (numerator_power != 2 && numerator_power != 3) {
    throw std::invalid_argument("numerator power must be 2 or 3, got " +
                                std::to_string(numerator_power));
  }
}

double GuardConfig::continuity_gap() const {
  const double above = (2.0 + delta) - 2.0;
  const double below = 2.0 - (2.0 - delta);
  return std::fmax(std::fabs(above - epsilon), std::fabs(below - epsilon));
}

ad::Var build(FunctionKind kind, const GuardConfig& cfg, ad::Tape& tape,
              ad::Var x) {
  cfg.validate();
  const int p = cfg.numerator_power;
  const ad::Var two = tape.constant(2.0);

  if (kind == FunctionKind::HExact) {
    if (p == 2) {
      return tape.add(x, two);
    }
    const ad::Var square = tape.powi(x, 2);
    const ad::Var linear = tape.mul(two, x);
    return tape.add(tape.add(square, linear), tape.constant(4.0));
  }

  const ad::Var numerator = tape.sub(tape.powi(x, p), tape.constant(two_to(p)));
  const ad::Var denominator = tape.sub(x, two);
  const ad::Var plain = tape.div(numerator, denominator);
  const double g = denominator.value();

  switch (kind) {
    case FunctionKind::H:
      return plain;

    case FunctionKind::H1: {
      const ad::Var s = tape.sign(denominator, cfg.sign_at_zero);
      const ad::Var shift = tape.mul(s, tape.constant(cfg.epsilon));
      const ad::Var guarded =
          tape.div(numerator, tape.add(denominator, shift));
      return tape.select(in_window(cfg, x.value()), guarded, plain);
    }

    case FunctionKind::H1Hat:
    case FunctionKind::H2: {
      const ad::Var s = tape.sign(denominator, cfg.sign_at_zero);
      const ad::Var guarded =
          tape.div(numerator, tape.mul(s, tape.constant(cfg.epsilon)));
      const bool active = kind == FunctionKind::H1Hat
                              ? in_window(cfg, x.value())
                              : in_band(cfg, g);
      return tape.select(active, guarded, plain);
    }

    case FunctionKind::H2Hat: {
      const ad::Var below =
          tape.div(numerator, tape.constant(-cfg.epsilon));
      const ad::Var above = tape.div(numerator, tape.constant(cfg.epsilon));
      const ad::Var at_zero =
          cfg.sign_at_zero == ad::Sign::Positive ? above : below;
      const ad::Var nonzero = tape.select(
          -cfg.epsilon < g && g < 0.0, below,
          tape.select(0.0 < g && g < cfg.epsilon, above, plain));
      return tape.select(g == 0.0, at_zero, nonzero);
    }

    case FunctionKind::HExact:
      break;
  }
  return plain;
}

Evaluation evaluate(FunctionKind kind, const GuardConfig& cfg, double x) {
  ad::Tape tape;
  const ad::Var input = tape.variable(x);
  const ad::Var out = build(kind, cfg, tape, input);
  const ad::Gradient grad = tape.backward(out);
  return {out.value(), grad[input]};
}

double forward_value(FunctionKind kind, const GuardConfig& cfg, double x) {
  ad::Tape tape;
  return build(kind, cfg, tape, tape.variable(x)).value();
}

RemovableSingularity::RemovableSingularity(Rational limit)
    : std::domain_error("removable singularity at x = 2; limit is " +
                        limit.get_str()),
      limit_(std::move(limit)) {}

Rational analytic_value(FunctionKind kind, const GuardConfig& cfg, double x) {
  cfg.validate();
  const int p = cfg.numerator_power;
  const Rational X = exact::from_double(x);
  const Rational G = X - 2;
  const Rational F = exact::pow(X, p) - exact::pow(Rational(2), p);
  const Rational eps = exact::from_double(cfg.epsilon);
  const Rational delta = exact::from_double(cfg.delta);

  auto quotient = [&]() -> Rational {
    if (G == 0) {
      throw RemovableSingularity(Rational(p) * exact::pow(Rational(2), p - 1));
    }
    return F / G;
  };
  const bool window = 2 - delta < X && X < 2 + delta;
  const Rational signed_eps = sign_of(G, cfg.sign_at_zero) * eps;

  switch (kind) {
    case FunctionKind::H:
      return quotient();
    case FunctionKind::HExact: {
      Rational sum;
      for (int k = 0; k < p; ++k) {
        sum += exact::pow(Rational(2), p - 1 - k) * exact::pow(X, k);
      }
      return sum;
    }
    case FunctionKind::H1:
      return window ? F / (G + signed_eps) : quotient();
    case FunctionKind::H1Hat:
      return window ? F / signed_eps : quotient();
    case FunctionKind::H2:
      return abs(G) < eps ? F / signed_eps : quotient();
    case FunctionKind::H2Hat:
      if (-eps < G && G < 0) return F / -eps;
      if (0 < G && G < eps) return F / eps;
      if (G == 0) return F / signed_eps;
      return quotient();
  }
  return quotient();
}

Rational simplified_derivative(int power, double x) {
  const Rational X = exact::from_double(x);
  Rational sum;
  for (int k = 1; k < power; ++k) {
    sum += k * exact::pow(Rational(2), power - 1 - k) * exact::pow(X, k - 1);
  }
  return sum;
}

UnderflowFlags observe_underflow(double gamma, int power) {
  const double x = 2.0 + gamma;
  UnderflowFlags flags;
  flags.denominator_lost = x == 2.0;
  if (flags.denominator_lost) {
    flags.numerator_lost = true;
    return flags;
  }
  // Same multiplication order as Tape::powi.
  const double square = x * x;
  const double rounded = power == 3 ? square * x : square;
  const Rational step = exact::from_double(x) - 2;
  const Rational linear = exact::pow(Rational(2), power) +
                          power * exact::pow(Rational(2), power - 1) * step;
  flags.numerator_lost = exact::from_double(rounded) == linear;
  return flags;
}

double predicted_backprop(FunctionKind kind, const GuardConfig& cfg,
                          double gamma, UnderflowFlags flags) {
  cfg.validate();
  const int p = cfg.numerator_power;
  if (!std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be finite");
  }
  if (flags != observe_underflow(gamma, p)) {
    throw std::invalid_argument(
        "underflow flags are inconsistent with gamma = " +
        std::to_string(gamma));
  }

  const double x = 2.0 + gamma;
  const Rational X = exact::from_double(x);
  const Rational G = X - 2;
  const Rational eps = exact::from_double(cfg.epsilon);
  const Rational leading = p * exact::pow(Rational(2), p - 1);

  auto unguarded = [&]() -> double {
    if (flags.denominator_lost) return kNaN;
    if (flags.numerator_lost) {
      return exact::to_double(Rational(p * (p - 1)) *
                              exact::pow(Rational(2), p - 2));
    }
    return exact::to_double(simplified_derivative(p, x));
  };
  // Derivative of f / (S eps): the denominator's own derivative is zero.
  auto constant_denominator = [&](const Rational& denom) -> double {
    return exact::to_double(power_partial(p, X) / denom);
  };
  const Rational signed_eps = sign_of(G, cfg.sign_at_zero) * eps;

  switch (kind) {
    case FunctionKind::H:
      return unguarded();
    case FunctionKind::HExact:
      return exact::to_double(simplified_derivative(p, x));
    case FunctionKind::H1: {
      if (!in_window(cfg, x)) return unguarded();
      const Rational d = G + signed_eps;
      if (flags.denominator_lost) {
        return exact::to_double(leading / signed_eps);
      }
      const Rational numerator =
          flags.numerator_lost ? Rational(leading * G)
                               : Rational(exact::pow(X, p) - exact::pow(Rational(2), p));
      return exact::to_double(power_partial(p, X) / d - numerator / (d * d));
    }
    case FunctionKind::H1Hat:
      return in_window(cfg, x) ? constant_denominator(signed_eps)
                               : unguarded();
    case FunctionKind::H2:
      return in_band(cfg, x - 2.0) ? constant_denominator(signed_eps)
                                   : unguarded();
    case FunctionKind::H2Hat:
      return in_band(cfg, x - 2.0) ? constant_denominator(signed_eps)
                                   : unguarded();
  }
  return unguarded();
}

}  // namespace guarddiv::fn

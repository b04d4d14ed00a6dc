// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "guarddiv/functions.hpp"
#include "oracle/nearest_double.hpp"

namespace {

using guarddiv::ad::OpKind;
using guarddiv::ad::Sign;
using guarddiv::ad::Tape;
using guarddiv::ad::Var;
using guarddiv::exact::Rational;
using guarddiv::fn::analytic_value;
using guarddiv::fn::evaluate;
using guarddiv::fn::forward_value;
using guarddiv::fn::FunctionKind;
using guarddiv::fn::GuardConfig;
using guarddiv::fn::kAllKinds;
using guarddiv::fn::observe_underflow;
using guarddiv::fn::predicted_backprop;
using guarddiv::fn::UnderflowFlags;

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

GuardConfig config(double eps, double delta = 1e-4, int p = 2,
                   Sign at_zero = Sign::Positive) {
  GuardConfig cfg;
  cfg.epsilon = eps;
  cfg.delta = delta;
  cfg.numerator_power = p;
  cfg.sign_at_zero = at_zero;
  return cfg;
}

TEST(Names, RoundTrip) {
  for (FunctionKind k : kAllKinds) {
    EXPECT_EQ(guarddiv::fn::parse_kind(guarddiv::fn::to_string(k)), k);
  }
  EXPECT_EQ(guarddiv::fn::to_string(FunctionKind::H1Hat), "H1_HAT");
  EXPECT_FALSE(guarddiv::fn::parse_kind("h1").has_value());
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(GuardConfig{}.validate());
  EXPECT_THROW(config(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(-1e-8).validate(), std::invalid_argument);
  EXPECT_THROW(config(NAN).validate(), std::invalid_argument);
  EXPECT_THROW(config(1e-8, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(config(1e-8, INFINITY).validate(), std::invalid_argument);
  EXPECT_THROW(config(1e-8, 1e-4, 4).validate(), std::invalid_argument);
  Tape t;
  EXPECT_THROW(guarddiv::fn::build(FunctionKind::H, config(0.0), t,
                                   t.variable(2.0)),
               std::invalid_argument);
}

TEST(Config, ContinuityGap) {
  EXPECT_EQ(config(0x1p-20, 0x1p-20).continuity_gap(), 0.0);
  EXPECT_NEAR(config(1e-8, 1e-4).continuity_gap(), 1e-4 - 1e-8, 1e-15);
}

TEST(Build, QuotientValues) {
  const GuardConfig cfg;
  EXPECT_TRUE(std::isnan(forward_value(FunctionKind::H, cfg, 2.0)));
  EXPECT_EQ(forward_value(FunctionKind::H, cfg, 2.0 + 0x1p-27), 4.0);
  EXPECT_EQ(forward_value(FunctionKind::H, cfg, 3.0), 5.0);
  EXPECT_EQ(forward_value(FunctionKind::HExact, cfg, 2.0), 4.0);
  EXPECT_EQ(forward_value(FunctionKind::HExact, config(1e-8, 1e-4, 3), 2.0),
            12.0);
  EXPECT_EQ(forward_value(FunctionKind::H, config(1e-8, 1e-4, 3), 3.0), 19.0);
}

TEST(Build, GuardedValuesAtTwo) {
  const GuardConfig cfg = config(1e-8);
  for (FunctionKind k : {FunctionKind::H1, FunctionKind::H1Hat,
                         FunctionKind::H2, FunctionKind::H2Hat}) {
    EXPECT_EQ(forward_value(k, cfg, 2.0), 0.0) << guarddiv::fn::to_string(k);
  }
}

TEST(Build, H1BlowupAtTwo) {
  const auto e = evaluate(FunctionKind::H1, config(1e-8), 2.0);
  EXPECT_EQ(bits(e.grad), bits(4.0 / 1e-8));
  EXPECT_EQ(evaluate(FunctionKind::H1, config(0x1p-27), 2.0).grad, 0x1p29);
}

TEST(Build, H2MatchesStepThrough) {
  // Forward and reverse written out in binary64 for the guarded branch.
  const GuardConfig cfg = config(1e-4);
  for (double gamma : {3e-5, -7.5e-5, 1e-9, -2.5e-13, 9.999e-5}) {
    const double x = 2.0 + gamma;
    const double g = x - 2.0;
    const double s = g < 0 ? -1.0 : 1.0;
    const double den = s * cfg.epsilon;
    const double f = x * x - 4.0;
    const double value = f / den;
    const double grad = (1.0 / den) * (2.0 * x);
    const auto e = evaluate(FunctionKind::H2, cfg, x);
    EXPECT_EQ(bits(e.value), bits(value)) << gamma;
    EXPECT_EQ(bits(e.grad), bits(grad)) << gamma;
  }
}

TEST(Build, H2HatZeroRoutesBySignAtZero) {
  const auto pos = evaluate(FunctionKind::H2Hat, config(1e-8), 2.0);
  const auto neg =
      evaluate(FunctionKind::H2Hat, config(1e-8, 1e-4, 2, Sign::Negative), 2.0);
  EXPECT_EQ(pos.grad, 4.0 / 1e-8);
  EXPECT_EQ(neg.grad, 4.0 / -1e-8);
  EXPECT_TRUE(std::signbit(neg.value));
  const auto h2 =
      evaluate(FunctionKind::H2, config(1e-8, 1e-4, 2, Sign::Negative), 2.0);
  EXPECT_EQ(bits(h2.grad), bits(neg.grad));
}

TEST(Build, WindowAndBandPredicatesDiffer) {
  const GuardConfig cfg = config(1e-8);
  const double x = 2.0 + 1e-6;  // inside delta, outside eps
  EXPECT_GT(forward_value(FunctionKind::H1Hat, cfg, x), 100.0);
  EXPECT_EQ(bits(forward_value(FunctionKind::H2, cfg, x)),
            bits(forward_value(FunctionKind::H, cfg, x)));
  EXPECT_EQ(bits(forward_value(FunctionKind::H2Hat, cfg, x)),
            bits(forward_value(FunctionKind::H, cfg, x)));
}

TEST(Build, H2HatAgreesWithH2OffZero) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2e-4, 2e-4);
  const GuardConfig cfg = config(1e-4);
  for (int i = 0; i < 2000; ++i) {
    const double x = 2.0 + d(rng);
    const auto a = evaluate(FunctionKind::H2, cfg, x);
    const auto b = evaluate(FunctionKind::H2Hat, cfg, x);
    ASSERT_EQ(bits(a.value), bits(b.value)) << x;
    ASSERT_EQ(bits(a.grad), bits(b.grad)) << x;
  }
}

// Each select picks the branch its binary64 predicate names, and its value
// is that branch's value bit for bit.
TEST(Build, BranchConsistency) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> expo(-20.0, -1.0);
  std::bernoulli_distribution neg(0.5);
  for (int i = 0; i < 3000; ++i) {
    const double mag = std::pow(10.0, expo(rng));
    const double x = 2.0 + (neg(rng) ? -mag : mag);
    for (double eps : {1e-8, 1e-4}) {
      const GuardConfig cfg = config(eps);
      for (FunctionKind k : {FunctionKind::H1, FunctionKind::H1Hat,
                             FunctionKind::H2, FunctionKind::H2Hat}) {
        Tape t;
        const Var out = guarddiv::fn::build(k, cfg, t, t.variable(x));
        const auto& nodes = t.nodes();
        for (const auto& n : nodes) {
          if (n.op != OpKind::Select) continue;
          ASSERT_EQ(bits(n.value), bits(nodes[n.args[0]].value));
        }
        const double g = x - 2.0;
        const bool window = 2.0 - cfg.delta < x && x < 2.0 + cfg.delta;
        const bool band = std::fabs(g) < eps;
        const bool guarded =
            (k == FunctionKind::H1 || k == FunctionKind::H1Hat) ? window
                                                                 : band;
        const double plain = forward_value(FunctionKind::H, cfg, x);
        if (!guarded) {
          ASSERT_EQ(bits(out.value()), bits(plain)) << x;
        } else if (k != FunctionKind::H2Hat || g != 0.0) {
          const double s = g < 0 ? -1.0 : 1.0;
          const double f = x * x - 4.0;
          const double expect = k == FunctionKind::H1 ? f / (g + s * eps)
                                                      : f / (s * eps);
          ASSERT_EQ(bits(out.value()), bits(expect)) << x;
        }
      }
    }
  }
}

TEST(Analytic, Examples) {
  const GuardConfig cfg;
  EXPECT_EQ(analytic_value(FunctionKind::H, cfg, 3.0), Rational(5));
  EXPECT_EQ(analytic_value(FunctionKind::HExact, cfg, 2.0), Rational(4));
  const double x = 2.0 + 0x1p-27;
  EXPECT_EQ(analytic_value(FunctionKind::H, cfg, x),
            Rational(4) + Rational(1, 1u << 27));
  try {
    analytic_value(FunctionKind::H, cfg, 2.0);
    FAIL() << "expected RemovableSingularity";
  } catch (const guarddiv::fn::RemovableSingularity& s) {
    EXPECT_EQ(s.limit(), Rational(4));
  }
  try {
    analytic_value(FunctionKind::H, config(1e-8, 1e-4, 3), 2.0);
    FAIL() << "expected RemovableSingularity";
  } catch (const guarddiv::fn::RemovableSingularity& s) {
    EXPECT_EQ(s.limit(), Rational(12));
  }
  // Guarded forms are defined at 2.
  EXPECT_EQ(analytic_value(FunctionKind::H1, cfg, 2.0), Rational(0));
}

TEST(Analytic, ForwardValuesAgreeAwayFromTwo) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> expo(-3.0, -1.0);
  std::bernoulli_distribution neg(0.5);
  for (int p : {2, 3}) {
    const GuardConfig cfg = config(1e-8, 1e-4, p);
    for (int i = 0; i < 500; ++i) {
      const double mag = std::pow(10.0, expo(rng));
      const double x = 2.0 + (neg(rng) ? -mag : mag);
      for (FunctionKind k : kAllKinds) {
        const double exact =
            guarddiv::exact::to_double(analytic_value(k, cfg, x));
        const double got = forward_value(k, cfg, x);
        ASSERT_NEAR(got, exact, 1e-12 * std::fabs(exact))
            << guarddiv::fn::to_string(k) << " p=" << p << " x=" << x;
      }
    }
  }
}

TEST(Analytic, SimplifiedDerivative) {
  EXPECT_EQ(guarddiv::fn::simplified_derivative(2, 2.5), Rational(1));
  EXPECT_EQ(guarddiv::fn::simplified_derivative(3, 3.0), Rational(8));
}

TEST(Underflow, Flags) {
  EXPECT_EQ(observe_underflow(0.0, 2), (UnderflowFlags{true, true}));
  EXPECT_EQ(observe_underflow(1e-20, 2), (UnderflowFlags{true, true}));
  EXPECT_EQ(observe_underflow(0x1p-27, 2), (UnderflowFlags{true, false}));
  EXPECT_EQ(observe_underflow(1e-3, 2), (UnderflowFlags{false, false}));
  EXPECT_EQ(observe_underflow(1e-3, 3), (UnderflowFlags{false, false}));
}

TEST(Predicted, UnguardedExamples) {
  const GuardConfig cfg;
  EXPECT_TRUE(std::isnan(predicted_backprop(FunctionKind::H, cfg, 1e-20,
                                            {true, true})));
  EXPECT_EQ(predicted_backprop(FunctionKind::H, cfg, 0x1p-27, {true, false}),
            2.0);
  EXPECT_EQ(predicted_backprop(FunctionKind::H, cfg, 1e-2, {false, false}),
            1.0);
  EXPECT_EQ(predicted_backprop(FunctionKind::HExact, cfg, 1e-20, {true, true}),
            1.0);
  const GuardConfig cube = config(1e-8, 1e-4, 3);
  EXPECT_EQ(predicted_backprop(FunctionKind::H, cube, 0x1p-30,
                               observe_underflow(0x1p-30, 3)),
            12.0);
}

TEST(Predicted, GuardedExamples) {
  const GuardConfig cfg = config(1e-8);
  EXPECT_EQ(predicted_backprop(FunctionKind::H1, cfg, 0.0, {true, true}),
            4.0 / 1e-8);
  EXPECT_EQ(predicted_backprop(FunctionKind::H1Hat, cfg, 0.0, {true, true}),
            4.0 / 1e-8);
  // Outside the window H1 falls back to the plain quotient.
  EXPECT_EQ(predicted_backprop(FunctionKind::H1, cfg, 1e-2, {false, false}),
            1.0);
}

TEST(Predicted, RejectsInconsistentFlags) {
  const GuardConfig cfg;
  EXPECT_THROW(predicted_backprop(FunctionKind::H, cfg, 1e-2, {true, false}),
               std::invalid_argument);
  EXPECT_THROW(predicted_backprop(FunctionKind::H, cfg, 0x1p-27, {false, false}),
               std::invalid_argument);
  EXPECT_THROW(predicted_backprop(FunctionKind::H, cfg, 1e-20, {true, false}),
               std::invalid_argument);
  EXPECT_THROW(predicted_backprop(FunctionKind::H, cfg, NAN, {false, false}),
               std::invalid_argument);
}

TEST(Predicted, MatchesBackpropInTheYellowRegime) {
  // Both numerator and window behave as predicted, so the prediction is the
  // exact derivative of what the tape computes, rounded once; backprop rounds
  // a few more times.
  const GuardConfig cfg = config(1e-8);
  for (double gamma : {1e-9, -3e-10, 2e-11, -5e-13}) {
    const auto flags = observe_underflow(gamma, 2);
    ASSERT_TRUE(flags.numerator_lost);
    for (FunctionKind k : {FunctionKind::H, FunctionKind::H1,
                           FunctionKind::H1Hat, FunctionKind::H2}) {
      const double pred = predicted_backprop(k, cfg, gamma, flags);
      const double got = evaluate(k, cfg, 2.0 + gamma).grad;
      EXPECT_NEAR(got, pred, 1e-9 * std::fabs(pred))
          << guarddiv::fn::to_string(k) << " gamma=" << gamma;
    }
  }
}

TEST(Continuity, H1JumpAtWindowEdge) {
  // f/(g + eps) against f/g at g = delta: the gap is about 4 eps / delta.
  const GuardConfig cfg = config(1e-8);
  const double edge = 2.0 + cfg.delta;
  const double inside = std::nextafter(edge, 0.0);
  const double jump = forward_value(FunctionKind::H1, cfg, edge) -
                      forward_value(FunctionKind::H1, cfg, inside);
  EXPECT_NEAR(jump, 4.0 * cfg.epsilon / cfg.delta,
              1e-3 * 4.0 * cfg.epsilon / cfg.delta);
}

TEST(Continuity, H2IsDiscretelyContinuousAtBandEdge) {
  // In exact arithmetic f/(S eps) meets f/g at |g| = eps. In binary64 the
  // jump across the edge must be no larger than ordinary steps inside.
  const GuardConfig cfg = config(1e-4);
  for (double sign : {1.0, -1.0}) {
    double x = 2.0 + sign * cfg.epsilon;
    // Step inward until the guarded branch is active.
    while (!(std::fabs(x - 2.0) < cfg.epsilon)) x = std::nextafter(x, 2.0);
    const double outside = std::nextafter(x, sign * INFINITY);
    ASSERT_FALSE(std::fabs(outside - 2.0) < cfg.epsilon);

    double max_step = 0.0;
    double prev = forward_value(FunctionKind::H2, cfg, x);
    double y = x;
    for (int i = 0; i < 64; ++i) {
      y = std::nextafter(y, 2.0);
      const double v = forward_value(FunctionKind::H2, cfg, y);
      max_step = std::fmax(max_step, std::fabs(v - prev));
      prev = v;
    }
    const double jump = std::fabs(forward_value(FunctionKind::H2, cfg, outside) -
                                  forward_value(FunctionKind::H2, cfg, x));
    EXPECT_LE(jump, 2.0 * max_step) << "sign " << sign;
    EXPECT_GT(max_step, 0.0);
  }
}

TEST(Evaluate, LinearAwayFromTwo) {
  const GuardConfig cfg;
  EXPECT_EQ(evaluate(FunctionKind::HExact, cfg, 2.0).grad, 1.0);
  EXPECT_TRUE(std::isnan(evaluate(FunctionKind::H, cfg, 2.0).grad));
  EXPECT_EQ(evaluate(FunctionKind::H, cfg, 2.0 + 0x1p-27).grad, 2.0);
}

}  // namespace

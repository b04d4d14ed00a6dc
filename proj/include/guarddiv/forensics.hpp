// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "guarddiv/functions.hpp"

namespace guarddiv::forensics {

enum class SignSet { Positive, Negative, Both };

/// Log-uniform grid of perturbations gamma around x = 2. Each decade
/// [10^e, 10^(e+1)) for min_exponent <= e < max_exponent holds
/// points_per_decade magnitudes.
struct GammaSweep {
  int min_exponent = -20;
  int max_exponent = -1;
  int points_per_decade = 40;
  SignSet signs = SignSet::Both;
  bool include_zero = true;

  bool operator==(const GammaSweep&) const = default;
};

/// Ascending list: negative magnitudes (largest first), then +0.0, then
/// positive magnitudes. Throws std::invalid_argument for an empty range.
std::vector<double> generate_sweep(const GammaSweep& sweep);

/// Floating-point regime of one sample; the comments name the plot colors.
enum class Region {
  Exact,                 // green
  NumeratorUnderflow,    // yellow
  DenominatorUnderflow,  // red
  GuardedUnperturbed,    // black
  Partial,               // alpha transition band at the edge of yellow
};

std::string_view to_string(Region region);
std::optional<Region> parse_region(std::string_view name);

/// A sample is Partial while rounding fl(x^p) may discard more than this
/// fraction of the nonlinear part of x^p.
inline constexpr double kPartialLossFraction = 0x1p-10;

Region classify(double gamma, fn::FunctionKind kind,
                const fn::GuardConfig& cfg);

/// alpha in fl(x*x) == 4 + 4s + alpha s^2, with x = fl(2 + gamma) and
/// s = x - 2 the perturbation the tape actually sees (s == gamma whenever
/// 2 + gamma is representable). Computed exactly, rounded once.
/// Throws std::invalid_argument when gamma == 0 or fl(2 + gamma) == 2.
double alpha_factor(double gamma);

/// The same ratio for x^p: (fl(x^p) - linear part) / (nonlinear part).
double alpha_factor(double gamma, int power);

/// (F(x + step) - F(x - step)) / (2 step) from forward passes only.
double finite_difference(fn::FunctionKind kind, const fn::GuardConfig& cfg,
                         double x, double step);

struct SampleRecord {
  double gamma = 0.0;
  double x = 0.0;
  double value = 0.0;
  double grad = 0.0;
  double analytic_value = 0.0;
  double analytic_grad = 0.0;
  double predicted_degenerate = 0.0;
  Region region = Region::Exact;
  std::optional<double> alpha;
};

/// One gamma: a single tape provides both value and grad.
SampleRecord run_sample(fn::FunctionKind kind, const fn::GuardConfig& cfg,
                        double gamma);

/// Serial reference.
std::vector<SampleRecord> run_experiment_serial(fn::FunctionKind kind,
                                                const fn::GuardConfig& cfg,
                                                std::span<const double> gammas);

/// OpenMP-parallel over samples; output is in input order and bit-identical
/// to run_experiment_serial.
std::vector<SampleRecord> run_experiment(fn::FunctionKind kind,
                                         const fn::GuardConfig& cfg,
                                         std::span<const double> gammas);

std::vector<SampleRecord> run_experiment(fn::FunctionKind kind,
                                         const fn::GuardConfig& cfg,
                                         const GammaSweep& sweep);

}  // namespace guarddiv::forensics

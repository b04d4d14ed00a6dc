// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "guarddiv/forensics.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace guarddiv::forensics {

using exact::Rational;
using fn::FunctionKind;
using fn::GuardConfig;

namespace {

struct PowerSplit {
  double rounded;      // fl(x^p), multiplied left to right
  Rational linear;     // 2^p + p 2^(p-1) s
  Rational nonlinear;  // x^p - linear, exact
};

PowerSplit split_power(double x, int power) {
  const double square = x * x;
  const Rational X = exact::from_double(x);
  const Rational s = X - 2;
  const Rational linear = exact::pow(Rational(2), power) +
                          power * exact::pow(Rational(2), power - 1) * s;
  return {power == 3 ? square * x : square, linear,
          exact::pow(X, power) - linear};
}

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

std::vector<double> generate_sweep(const GammaSweep& sweep) {
  if (sweep.min_exponent >= sweep.max_exponent) {
    throw std::invalid_argument("sweep needs min_exponent < max_exponent");
  }
  if (sweep.points_per_decade <= 0) {
    throw std::invalid_argument("sweep needs a positive points_per_decade");
  }
  std::vector<double> magnitudes;
  for (int e = sweep.min_exponent; e < sweep.max_exponent; ++e) {
    for (int k = 0; k < sweep.points_per_decade; ++k) {
      const double exponent =
          e + static_cast<double>(k) / sweep.points_per_decade;
      magnitudes.push_back(std::pow(10.0, exponent));
    }
  }

  std::vector<double> out;
  out.reserve(2 * magnitudes.size() + 1);
  if (sweep.signs != SignSet::Positive) {
    for (auto it = magnitudes.rbegin(); it != magnitudes.rend(); ++it) {
      out.push_back(-*it);
    }
  }
  if (sweep.include_zero) {
    out.push_back(0.0);
  }
  if (sweep.signs != SignSet::Negative) {
    out.insert(out.end(), magnitudes.begin(), magnitudes.end());
  }
  return out;
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::Exact: return "EXACT";
    case Region::NumeratorUnderflow: return "NUMERATOR_UNDERFLOW";
    case Region::DenominatorUnderflow: return "DENOMINATOR_UNDERFLOW";
    case Region::GuardedUnperturbed: return "GUARDED_UNPERTURBED";
    case Region::Partial: return "PARTIAL";
  }
  return "?";
}

std::optional<Region> parse_region(std::string_view name) {
  for (Region r : {Region::Exact, Region::NumeratorUnderflow,
                   Region::DenominatorUnderflow, Region::GuardedUnperturbed,
                   Region::Partial}) {
    if (to_string(r) == name) {
      return r;
    }
  }
  return std::nullopt;
}

Region classify(double gamma, FunctionKind kind, const GuardConfig& cfg) {
  cfg.validate();
  // gamma == 0 evaluates like the red points but is not itself a lost
  // perturbation; it keeps the green label.
  if (gamma == 0.0) {
    return Region::Exact;
  }
  const double x = 2.0 + gamma;
  if (x == 2.0) {
    return Region::DenominatorUnderflow;
  }
  if (kind == FunctionKind::HExact) {
    return Region::Exact;
  }
  if (fn::is_guarded(kind) &&
      bit_equal(fn::forward_value(kind, cfg, x),
                fn::forward_value(FunctionKind::H, cfg, x))) {
    return Region::GuardedUnperturbed;
  }

  const PowerSplit split = split_power(x, cfg.numerator_power);
  const Rational rounded = exact::from_double(split.rounded);
  if (rounded == split.linear) {
    return Region::NumeratorUnderflow;
  }
  const double spacing =
      std::nextafter(split.rounded, std::numeric_limits<double>::infinity()) -
      split.rounded;
  const Rational worst_loss = exact::from_double(spacing) / 2;
  if (worst_loss > kPartialLossFraction * abs(split.nonlinear)) {
    return Region::Partial;
  }
  return Region::Exact;
}

double alpha_factor(double gamma, int power) {
  const double x = 2.0 + gamma;
  if (gamma == 0.0 || x == 2.0) {
    throw std::invalid_argument(
        "alpha is undefined when the perturbation is zero or rounds away");
  }
  const PowerSplit split = split_power(x, power);
  return exact::to_double((exact::from_double(split.rounded) - split.linear) /
                          split.nonlinear);
}

double alpha_factor(double gamma) { return alpha_factor(gamma, 2); }

double finite_difference(FunctionKind kind, const GuardConfig& cfg, double x,
                         double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite difference step must be positive");
  }
  const double above = fn::forward_value(kind, cfg, x + step);
  const double below = fn::forward_value(kind, cfg, x - step);
  return (above - below) / (2.0 * step);
}

SampleRecord run_sample(FunctionKind kind, const GuardConfig& cfg,
                        double gamma) {
  const int p = cfg.numerator_power;
  SampleRecord rec;
  rec.gamma = gamma;
  rec.x = 2.0 + gamma;

  const fn::Evaluation eval = fn::evaluate(kind, cfg, rec.x);
  rec.value = eval.value;
  rec.grad = eval.grad;

  try {
    rec.analytic_value = exact::to_double(fn::analytic_value(kind, cfg, rec.x));
  } catch (const fn::RemovableSingularity& s) {
    rec.analytic_value = exact::to_double(s.limit());
  }
  rec.analytic_grad = exact::to_double(fn::simplified_derivative(p, rec.x));
  rec.predicted_degenerate = fn::predicted_backprop(
      kind, cfg, gamma, fn::observe_underflow(gamma, p));

  rec.region = classify(gamma, kind, cfg);
  if (rec.region == Region::Partial) {
    rec.alpha = alpha_factor(gamma, p);
  }
  return rec;
}

std::vector<SampleRecord> run_experiment_serial(FunctionKind kind,
                                                const GuardConfig& cfg,
                                                std::span<const double> gammas) {
  cfg.validate();
  std::vector<SampleRecord> out;
  out.reserve(gammas.size());
  for (double gamma : gammas) {
    out.push_back(run_sample(kind, cfg, gamma));
  }
  return out;
}

std::vector<SampleRecord> run_experiment(FunctionKind kind,
                                         const GuardConfig& cfg,
                                         std::span<const double> gammas) {
  cfg.validate();
  std::vector<SampleRecord> out(gammas.size());
  const auto n = static_cast<std::ptrdiff_t>(gammas.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        run_sample(kind, cfg, gammas[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<SampleRecord> run_experiment(FunctionKind kind,
                                         const GuardConfig& cfg,
                                         const GammaSweep& sweep) {
  const std::vector<double> gammas = generate_sweep(sweep);
  return run_experiment(kind, cfg, gammas);
}

}  // namespace guarddiv::forensics

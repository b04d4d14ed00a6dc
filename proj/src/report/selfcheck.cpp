// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cfenv>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>

#include "guarddiv/report.hpp"

namespace guarddiv::report {

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

CheckResult check(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok, ok ? std::string{} : std::move(detail)};
}

std::vector<CheckResult> arithmetic_probes() {
  std::vector<CheckResult> out;
  out.push_back(check("binary64 format",
                      std::numeric_limits<double>::is_iec559 &&
                          std::numeric_limits<double>::digits == 53,
                      "double is not IEEE 754 binary64"));
  out.push_back(check("no extended evaluation", FLT_EVAL_METHOD == 0,
                      "FLT_EVAL_METHOD != 0: intermediates carry extra precision"));
  out.push_back(check("round to nearest", std::fegetround() == FE_TONEAREST,
                      "rounding mode is not round-to-nearest"));

  // volatile keeps the compiler from folding the probes at build time.
  volatile double one = 1.0;
  volatile double half_ulp = 0x1p-53;
  volatile double odd = 1.0 + 0x1p-52;
  out.push_back(check("ties to even (down)", one + half_ulp == 1.0,
                      "1 + 2^-53 did not round to 1"));
  out.push_back(check("ties to even (up)", odd + half_ulp == 1.0 + 0x1p-51,
                      "(1 + 2^-52) + 2^-53 did not round to 1 + 2^-51"));

  volatile double two = 2.0;
  volatile double tiny = 1e-20;
  out.push_back(check("2 + 1e-20 == 2", two + tiny == 2.0,
                      "2 + 1e-20 kept the small addend"));

  {
    ad::Tape tape;
    const ad::Var x = tape.variable(2.0 + 0x1p-27);
    const ad::Var sq = tape.mul(x, x);
    out.push_back(check("mul rounds once", same_bits(sq.value(), 4.0 + 0x1p-25),
                        "fl((2 + 2^-27)^2) != 4 + 2^-25, got " +
                            format_hex(sq.value())));
  }

  {
    // A fused multiply-add in the reverse sweep would leave 2^-54 behind.
    ad::Tape tape;
    const double k = 1.0 + 0x1p-27;
    const ad::Var x = tape.variable(1.0);
    const ad::Var y = tape.mul(x, tape.constant(k));
    const ad::Var t = tape.mul(y, tape.constant(k));
    const ad::Var u = tape.mul(x, tape.constant(-(1.0 + 0x1p-26)));
    const ad::Var out_var = tape.add(t, u);
    const double adj = tape.backward(out_var)[x];
    out.push_back(check("no contraction in backward", adj == 0.0,
                        "adjoint accumulation was fused, got " + format_hex(adj)));
  }
  {
    volatile double a = 1.0 + 0x1p-27;
    volatile double c = 1.0 + 0x1p-26;
    const double r = a * a - c;
    out.push_back(check("no contraction in expressions", r == 0.0,
                        "a*a - c was fused, got " + format_hex(r)));
  }
  return out;
}

std::vector<CheckResult> invariants() {
  std::vector<CheckResult> out;
  using forensics::Region;

  const auto fig1 = preset("fig1").value();
  const auto records = run_spec(fig1);
  bool plateau = true;
  bool nan_band = true;
  std::size_t yellow = 0;
  for (const auto& r : records) {
    if (r.region == Region::NumeratorUnderflow) {
      ++yellow;
      plateau = plateau && r.value == 4.0 && r.grad == 2.0;
    }
    if (r.gamma != 0.0 && std::fabs(r.gamma) <= 1e-17) {
      nan_band = nan_band && std::isnan(r.value) && std::isnan(r.grad);
    }
  }
  out.push_back(check("yellow plateau: h == 4, h' == 2", plateau && yellow > 0,
                      "a numerator-underflow sample left the plateau"));
  out.push_back(check("NaN band near gamma = 0", nan_band,
                      "a sample with |gamma| <= 1e-17 was not NaN"));

  fn::GuardConfig dyadic;
  dyadic.epsilon = 0x1p-27;
  const double blowup = fn::evaluate(fn::FunctionKind::H1, dyadic, 2.0).grad;
  out.push_back(check("h1'(2) == 4 / eps for eps = 2^-27", blowup == 0x1p29,
                      "got " + format_hex(blowup)));

  const std::string a = to_csv(records);
  const std::string b = to_csv(run_spec(fig1));
  out.push_back(check("deterministic CSV", a == b, "two runs differ"));
  return out;
}

}  // namespace

bool SelfcheckReport::passed() const {
  for (const auto& c : probes) {
    if (!c.passed) return false;
  }
  for (const auto& c : invariants) {
    if (!c.passed) return false;
  }
  return true;
}

SelfcheckReport selfcheck() {
  SelfcheckReport report;
  report.probes = arithmetic_probes();
  bool contract_ok = true;
  for (const auto& p : report.probes) contract_ok = contract_ok && p.passed;
  // Invariants are meaningless on a platform that breaks the contract.
  if (contract_ok) {
    report.invariants = invariants();
  }
  return report;
}

}  // namespace guarddiv::report

// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "guarddiv/tape.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace guarddiv::ad {

namespace {

std::uint64_t next_tape_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

std::string_view to_string(OpKind op) {
  switch (op) {
    case OpKind::Input: return "input";
    case OpKind::Constant: return "constant";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Neg: return "neg";
    case OpKind::Powi: return "powi";
    case OpKind::Sign: return "sign";
    case OpKind::Select: return "select";
  }
  return "?";
}

Tape::Tape() : id_(next_tape_id()) { nodes_.reserve(32); }

void Tape::check(Var v) const {
  if (v.tape_id() != id_ || v.index() >= nodes_.size()) {
    throw TapeMismatch("variable does not belong to this tape");
  }
}

Var Tape::push(Node node) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);
  return Var(id_, index, node.value);
}

Var Tape::variable(double value) {
  Var v = push({.op = OpKind::Input, .value = value});
  inputs_.push_back(v.index());
  return v;
}

Var Tape::constant(double value) {
  return push({.op = OpKind::Constant, .value = value});
}

Var Tape::add(Var a, Var b) {
  check(a);
  check(b);
  return push({.op = OpKind::Add,
               .arity = 2,
               .args = {a.index(), b.index()},
               .value = a.value() + b.value(),
               .partials = {1.0, 1.0}});
}

Var Tape::sub(Var a, Var b) {
  check(a);
  check(b);
  return push({.op = OpKind::Sub,
               .arity = 2,
               .args = {a.index(), b.index()},
               .value = a.value() - b.value(),
               .partials = {1.0, -1.0}});
}

Var Tape::mul(Var a, Var b) {
  check(a);
  check(b);
  return push({.op = OpKind::Mul,
               .arity = 2,
               .args = {a.index(), b.index()},
               .value = a.value() * b.value(),
               .partials = {b.value(), a.value()}});
}

Var Tape::div(Var a, Var b) {
  check(a);
  check(b);
  const double u = a.value();
  const double v = b.value();
  const double v_squared = v * v;
  const double u_over_v_squared = u / v_squared;
  return push({.op = OpKind::Div,
               .arity = 2,
               .args = {a.index(), b.index()},
               .value = u / v,
               .partials = {1.0 / v, -u_over_v_squared}});
}

Var Tape::neg(Var a) {
  check(a);
  return push({.op = OpKind::Neg,
               .arity = 1,
               .args = {a.index(), 0},
               .value = -a.value(),
               .partials = {-1.0, 0.0}});
}

Var Tape::powi(Var a, int n) {
  check(a);
  const double x = a.value();
  double value = 0.0;
  double partial = 0.0;
  switch (n) {
    case 1:
      value = x;
      partial = 1.0;
      break;
    case 2:
      value = x * x;
      partial = 2.0 * x;
      break;
    case 3: {
      const double square = x * x;
      value = square * x;
      partial = 3.0 * square;
      break;
    }
    default:
      throw std::invalid_argument("powi: exponent must be 1, 2 or 3, got " +
                                  std::to_string(n));
  }
  return push({.op = OpKind::Powi,
               .arity = 1,
               .args = {a.index(), 0},
               .value = value,
               .partials = {partial, 0.0}});
}

Var Tape::sign(Var a, Sign at_zero) {
  check(a);
  const double x = a.value();
  double value;
  if (std::isnan(x)) {
    value = std::numeric_limits<double>::quiet_NaN();
  } else if (x == 0.0) {
    value = to_double(at_zero);
  } else {
    value = x < 0.0 ? -1.0 : 1.0;
  }
  return push({.op = OpKind::Sign,
               .arity = 1,
               .args = {a.index(), 0},
               .value = value,
               .partials = {0.0, 0.0}});
}

Var Tape::select(bool condition, Var if_true, Var if_false) {
  check(if_true);
  check(if_false);
  const Var taken = condition ? if_true : if_false;
  const Var untaken = condition ? if_false : if_true;
  return push({.op = OpKind::Select,
               .arity = 2,
               .args = {taken.index(), untaken.index()},
               .value = taken.value(),
               .partials = {1.0, 0.0}});
}

Gradient Tape::backward(Var output) const {
  check(output);
  std::vector<double> adjoint(nodes_.size(), 0.0);
  std::vector<bool> reached(nodes_.size(), false);
  adjoint[output.index()] = 1.0;
  reached[output.index()] = true;

  auto send = [&](std::uint32_t target, double contribution) {
    adjoint[target] = adjoint[target] + contribution;
    reached[target] = true;
  };

  for (std::size_t i = output.index() + 1; i-- > 0;) {
    if (!reached[i]) {
      continue;
    }
    const Node& node = nodes_[i];
    const double seed = adjoint[i];
    switch (node.op) {
      case OpKind::Input:
      case OpKind::Constant:
      case OpKind::Sign:
        break;
      case OpKind::Select:
        send(node.args[0], seed * node.partials[0]);
        break;
      default:
        for (std::uint8_t k = 0; k < node.arity; ++k) {
          send(node.args[k], seed * node.partials[k]);
        }
        break;
    }
  }
  return Gradient(id_, std::move(adjoint), std::move(reached));
}

double Gradient::operator[](Var v) const {
  if (v.tape_id() != tape_id_ || v.index() >= adjoints_.size()) {
    throw TapeMismatch("variable does not belong to the differentiated tape");
  }
  return adjoints_[v.index()];
}

bool Gradient::reached(Var v) const {
  if (v.tape_id() != tape_id_ || v.index() >= reached_.size()) {
    throw TapeMismatch("variable does not belong to the differentiated tape");
  }
  return reached_[v.index()];
}

}  // namespace guarddiv::ad

// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * @file tape.hpp
 * @brief Scalar reverse-mode automatic differentiation over binary64.
 *
 * The tape records each forward operation together with its local partial
 * derivatives, evaluated from forward values at record time. The reverse
 * sweep multiplies adjoints by those stored partials and sums the results,
 * rounding after every multiply and every add. Nothing is simplified: a
 * quotient f/g contributes 1/g and -f/g^2 as two separately rounded
 * partials, exactly as graph-based frameworks do.
 *
 * Conditional control flow is expressed with select(), which evaluates both
 * branches eagerly and routes the adjoint to the taken branch only. Nodes
 * that are reachable solely through untaken branches are never visited by
 * the reverse sweep.
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace guarddiv::ad {

enum class OpKind : std::uint8_t {
  Input,
  Constant,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Powi,
  Sign,
  Select,
};

std::string_view to_string(OpKind op);

/// Value assigned to the sign function at zero.
enum class Sign : std::int8_t { Negative = -1, Positive = 1 };

constexpr double to_double(Sign s) { return s == Sign::Negative ? -1.0 : 1.0; }

/// Thrown when a handle is used with a tape that did not issue it.
class TapeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; carries the forward value.
class Var {
 public:
  double value() const { return value_; }
  std::uint32_t index() const { return index_; }
  std::uint64_t tape_id() const { return tape_id_; }

 private:
  friend class Tape;
  Var(std::uint64_t tape_id, std::uint32_t index, double value)
      : tape_id_(tape_id), index_(index), value_(value) {}

  std::uint64_t tape_id_;
  std::uint32_t index_;
  double value_;
};

struct Node {
  OpKind op = OpKind::Input;
  std::uint8_t arity = 0;
  // For Select, args[0] is the taken branch and args[1] the untaken one.
  std::array<std::uint32_t, 2> args{};
  double value = 0.0;
  std::array<double, 2> partials{};
};

class Gradient;

class Tape {
 public:
  Tape();

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  /// Leaf that collects a gradient. Any binary64, including NaN, is legal.
  Var variable(double value);
  /// Leaf that does not collect a gradient.
  Var constant(double value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  /// Records partials 1/b and -(a/(b*b)), each with its own roundings.
  Var div(Var a, Var b);
  Var neg(Var a);

  /// a^n for n in {1, 2, 3} by left-to-right multiplication. The local
  /// partial is n * a^(n-1), evaluated the same way and rounded.
  Var powi(Var a, int n);

  /// -1 or +1; `at_zero` for both signed zeros; NaN stays NaN. The partial
  /// is structurally zero, so no adjoint ever flows into `a`.
  Var sign(Var a, Sign at_zero);

  /// Copies the value of the taken branch. Both branches must already be on
  /// this tape.
  Var select(bool condition, Var if_true, Var if_false);

  /// Reverse sweep seeded with adjoint 1.0 at `output`.
  Gradient backward(Var output) const;

  std::span<const Node> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::uint64_t id() const { return id_; }
  const std::vector<std::uint32_t>& inputs() const { return inputs_; }

 private:
  void check(Var v) const;
  Var push(Node node);

  std::uint64_t id_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> inputs_;
};

/// Adjoints from one reverse sweep. Nodes the sweep never reached hold
/// exactly 0.0.
class Gradient {
 public:
  double operator[](Var v) const;
  bool reached(Var v) const;
  std::span<const double> adjoints() const { return adjoints_; }

 private:
  friend class Tape;
  Gradient(std::uint64_t tape_id, std::vector<double> adjoints,
           std::vector<bool> reached)
      : tape_id_(tape_id),
        adjoints_(std::move(adjoints)),
        reached_(std::move(reached)) {}

  std::uint64_t tape_id_;
  std::vector<double> adjoints_;
  std::vector<bool> reached_;
};

}  // namespace guarddiv::ad

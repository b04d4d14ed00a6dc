// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <charconv>

#include "guarddiv/report.hpp"

namespace guarddiv::report {

using fn::FunctionKind;

std::string_view to_string(PlotQuantity q) {
  return q == PlotQuantity::Value ? "value" : "grad";
}

std::string_view to_string(Transform t) {
  return t == Transform::Raw ? "raw" : "subtract-4-log-abs";
}

std::optional<PlotQuantity> parse_quantity(std::string_view s) {
  if (s == "value") return PlotQuantity::Value;
  if (s == "grad") return PlotQuantity::Grad;
  return std::nullopt;
}

std::optional<Transform> parse_transform(std::string_view s) {
  if (s == "raw") return Transform::Raw;
  if (s == "subtract-4-log-abs") return Transform::Subtract4LogAbs;
  return std::nullopt;
}

namespace {

ExperimentSpec make(std::string name, FunctionKind kind, double epsilon,
                    PlotQuantity plot, Transform transform) {
  ExperimentSpec spec;
  spec.name = std::move(name);
  spec.kind = kind;
  spec.cfg.epsilon = epsilon;
  spec.cfg.delta = 1e-4;
  spec.plot = plot;
  spec.transform = transform;
  return spec;
}

const std::vector<ExperimentSpec>& presets() {
  using enum PlotQuantity;
  using enum Transform;
  static const std::vector<ExperimentSpec> all = {
      make("fig1", FunctionKind::H, 1e-8, Value, Raw),
      make("fig2", FunctionKind::H, 1e-8, Value, Subtract4LogAbs),
      make("fig3", FunctionKind::H1, 1e-8, Value, Raw),
      make("fig4", FunctionKind::H1, 1e-8, Value, Subtract4LogAbs),
      make("fig5", FunctionKind::H, 1e-8, Grad, Raw),
      make("fig6", FunctionKind::H2, 1e-4, Value, Raw),
      make("fig7", FunctionKind::H1, 1e-8, Grad, Raw),
      make("fig8", FunctionKind::H2, 1e-4, Grad, Raw),
  };
  return all;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw UsageError("config: " + std::string(key) + " expects an integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw UsageError("config: " + std::string(key) +
                     " expects a number, got '" + std::string(v) + "'");
  }
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config: " + std::string(key) + " expects true or false");
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::optional<ExperimentSpec> preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

ExperimentSpec parse_config(std::string_view text) {
  ExperimentSpec spec;
  spec.name = "custom";
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "kind") {
      const auto kind = fn::parse_kind(value);
      if (!kind) throw UsageError("config: unknown kind '" + std::string(value) + "'");
      spec.kind = *kind;
    } else if (key == "epsilon") {
      spec.cfg.epsilon = parse_real(key, value);
    } else if (key == "delta") {
      spec.cfg.delta = parse_real(key, value);
    } else if (key == "sign_at_zero") {
      const int s = parse_int(key, value);
      if (s != 1 && s != -1) throw UsageError("config: sign_at_zero must be +1 or -1");
      spec.cfg.sign_at_zero = s > 0 ? ad::Sign::Positive : ad::Sign::Negative;
    } else if (key == "numerator_power") {
      spec.cfg.numerator_power = parse_int(key, value);
    } else if (key == "min_exponent") {
      spec.sweep.min_exponent = parse_int(key, value);
    } else if (key == "max_exponent") {
      spec.sweep.max_exponent = parse_int(key, value);
    } else if (key == "points_per_decade") {
      spec.sweep.points_per_decade = parse_int(key, value);
    } else if (key == "signs") {
      if (value == "+") spec.sweep.signs = forensics::SignSet::Positive;
      else if (value == "-") spec.sweep.signs = forensics::SignSet::Negative;
      else if (value == "both") spec.sweep.signs = forensics::SignSet::Both;
      else throw UsageError("config: signs must be +, - or both");
    } else if (key == "include_zero") {
      spec.sweep.include_zero = parse_bool(key, value);
    } else if (key == "plot") {
      const auto q = parse_quantity(value);
      if (!q) throw UsageError("config: plot must be value or grad");
      spec.plot = *q;
    } else if (key == "transform") {
      const auto t = parse_transform(value);
      if (!t) throw UsageError("config: transform must be raw or subtract-4-log-abs");
      spec.transform = *t;
    } else {
      throw UsageError("config: unknown key '" + std::string(key) + "'");
    }
  }

  try {
    spec.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (spec.sweep.min_exponent >= spec.sweep.max_exponent ||
      spec.sweep.points_per_decade <= 0) {
    throw UsageError("config: empty gamma sweep");
  }
  if (spec.name.empty() ||
      spec.name.find_first_of("/\\") != std::string::npos) {
    throw UsageError("config: name must be a plain file stem");
  }
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

}  // namespace guarddiv::report

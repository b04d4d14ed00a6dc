// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment presets, the CSV interchange format, SVG plots and the
// platform self-check behind the `guarddiv` command line tool.

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "guarddiv/forensics.hpp"
#include "guarddiv/functions.hpp"

namespace guarddiv::report {

// Error categories; the CLI maps them to exit codes 1, 3 and 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Experiment specs

enum class PlotQuantity { Value, Grad };
enum class Transform { Raw, Subtract4LogAbs };

std::string_view to_string(PlotQuantity q);
std::string_view to_string(Transform t);
std::optional<PlotQuantity> parse_quantity(std::string_view s);
std::optional<Transform> parse_transform(std::string_view s);

struct ExperimentSpec {
  std::string name;
  fn::FunctionKind kind = fn::FunctionKind::H;
  fn::GuardConfig cfg;
  forensics::GammaSweep sweep;
  PlotQuantity plot = PlotQuantity::Value;
  Transform transform = Transform::Raw;
};

/// fig1 .. fig8.
std::vector<std::string> preset_names();
std::optional<ExperimentSpec> preset(std::string_view name);

/// Flat `key = value` text; `#` starts a comment. Keys: name, kind, epsilon,
/// delta, sign_at_zero, numerator_power, min_exponent, max_exponent,
/// points_per_decade, signs, include_zero, plot, transform. Floating-point
/// values may be decimal or hexadecimal. Throws UsageError.
ExperimentSpec parse_config(std::string_view text);
ExperimentSpec load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Number formatting

/// Lossless hexadecimal float such as 0x1.0000002p+1; "nan", "inf", "-inf".
std::string format_hex(double v);
/// Shortest decimal that round-trips; "nan", "inf", "-inf".
std::string format_dec(double v);
/// Accepts format_hex and format_dec output. Throws std::invalid_argument.
double parse_double(std::string_view s);

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "gamma_hex,gamma_dec,x_hex,value_hex,value_dec,grad_hex,grad_dec,region,"
    "alpha_dec,analytic_value_dec,predicted_dec";

std::string to_csv(std::span<const forensics::SampleRecord> records);

struct CsvRow {
  double gamma = 0.0;
  double x = 0.0;
  double value = 0.0;
  double grad = 0.0;
  forensics::Region region = forensics::Region::Exact;
  std::optional<double> alpha;
  double analytic_value = 0.0;
  double predicted = 0.0;
};

/// Parses to_csv output. Throws CsvError naming the offending line.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary and renames, so a failed write leaves no file.
void write_file(const std::filesystem::path& path, std::string_view contents);

// ---------------------------------------------------------------------------
// SVG

struct PlotOptions {
  PlotQuantity quantity = PlotQuantity::Value;
  Transform transform = Transform::Raw;
  std::string title;
};

/// Symmetric-log gamma axis, one dot per finite sample colored by region.
/// Rows whose plotted quantity is NaN or infinite are left out. Throws
/// UsageError when `rows` is empty.
std::string render_svg(std::span<const CsvRow> rows, const PlotOptions& opts);

// ---------------------------------------------------------------------------
// Runs

struct RunOutput {
  std::filesystem::path csv;
  std::optional<std::filesystem::path> svg;
};

std::vector<forensics::SampleRecord> run_spec(const ExperimentSpec& spec);

/// Writes <out_dir>/<name>.csv and, with `svg`, <out_dir>/<name>.svg.
RunOutput run_to_files(const ExperimentSpec& spec,
                       const std::filesystem::path& out_dir, bool svg);

// ---------------------------------------------------------------------------
// Self-check

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfcheckReport {
  std::vector<CheckResult> probes;      // arithmetic contract
  std::vector<CheckResult> invariants;  // behavior of the engine itself
  bool passed() const;
};

SelfcheckReport selfcheck();

}  // namespace guarddiv::report

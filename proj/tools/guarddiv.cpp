// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

// guarddiv run <preset|--config path> [--out dir] [--svg]
// guarddiv render <csv> --out <svg> [--plot value|grad] [--transform ...]
// guarddiv selfcheck
//
// Exit codes: 0 ok, 1 usage, 2 arithmetic contract violation, 3 I/O.

#include <CLI11.hpp>

#include <iostream>

#include "guarddiv/report.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kContract = 2, kIo = 3 };

namespace report = guarddiv::report;

int run_command(const std::string& preset_name, const std::string& config,
                const std::string& out_dir, bool svg) {
  report::ExperimentSpec spec;
  if (!config.empty()) {
    if (!preset_name.empty()) {
      throw report::UsageError("give either a preset or --config, not both");
    }
    spec = report::load_config(config);
  } else {
    auto p = report::preset(preset_name);
    if (!p) {
      std::string known;
      for (const auto& n : report::preset_names()) known += " " + n;
      throw report::UsageError("unknown preset '" + preset_name +
                               "'; known:" + known);
    }
    spec = *p;
  }
  if (!std::filesystem::is_directory(out_dir)) {
    throw report::IoError(out_dir, "output directory does not exist");
  }
  const auto out = report::run_to_files(spec, out_dir, svg);
  std::cout << out.csv.string() << '\n';
  if (out.svg) std::cout << out.svg->string() << '\n';
  return kOk;
}

int render_command(const std::string& csv_path, const std::string& svg_path,
                   const std::string& plot, const std::string& transform) {
  report::PlotOptions opts;
  const auto q = report::parse_quantity(plot);
  const auto t = report::parse_transform(transform);
  if (!q) throw report::UsageError("--plot must be value or grad");
  if (!t) throw report::UsageError("--transform must be raw or subtract-4-log-abs");
  opts.quantity = *q;
  opts.transform = *t;
  opts.title = std::filesystem::path(csv_path).stem().string();

  const std::string text = report::read_file(csv_path);
  const auto rows = report::parse_csv(text);
  report::write_file(svg_path, report::render_svg(rows, opts));
  std::cout << svg_path << '\n';
  return kOk;
}

int selfcheck_command() {
  const auto rep = report::selfcheck();
  auto print = [](const report::CheckResult& c) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.passed) std::cout << "  (" << c.detail << ")";
    std::cout << '\n';
  };
  std::cout << "arithmetic contract\n";
  for (const auto& c : rep.probes) print(c);
  if (!rep.invariants.empty()) {
    std::cout << "engine invariants\n";
    for (const auto& c : rep.invariants) print(c);
  }
  return rep.passed() ? kOk : kContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backprop forensics for epsilon-guarded division"};
  app.require_subcommand(1);

  std::string preset_name, config, out_dir = ".";
  bool svg = false;
  auto* run = app.add_subcommand("run", "Run a preset or a config file, write CSV");
  run->add_option("preset", preset_name, "fig1 .. fig8");
  run->add_option("--config", config, "key = value experiment file");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--svg", svg, "also render an SVG plot");

  std::string csv_path, svg_path, plot = "value", transform = "raw";
  auto* render = app.add_subcommand("render", "Plot a CSV produced by run");
  render->add_option("csv", csv_path, "input CSV")->required();
  render->add_option("--out", svg_path, "output SVG")->required();
  render->add_option("--plot", plot, "value or grad");
  render->add_option("--transform", transform, "raw or subtract-4-log-abs");

  auto* check = app.add_subcommand("selfcheck", "Verify the arithmetic contract");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      if (preset_name.empty() && config.empty()) {
        throw report::UsageError("run needs a preset name or --config");
      }
      return run_command(preset_name, config, out_dir, svg);
    }
    if (*render) return render_command(csv_path, svg_path, plot, transform);
    if (*check) return selfcheck_command();
  } catch (const report::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const report::CsvError& e) {
    std::cerr << "malformed CSV: " << e.what() << '\n';
    return kUsage;
  } catch (const report::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

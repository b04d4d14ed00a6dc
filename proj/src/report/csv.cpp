// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "guarddiv/report.hpp"

namespace guarddiv::report {

namespace {

constexpr std::size_t kColumns = 11;

std::optional<std::string> special(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return std::nullopt;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_hex(double v) {
  if (auto s = special(v)) return *s;
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       std::fabs(v), std::chars_format::hex);
  std::string out = std::signbit(v) ? "-0x" : "0x";
  out.append(buf.data(), ptr);
  return out;
}

std::string format_dec(double v) {
  if (auto s = special(v)) return *s;
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();

  bool negative = false;
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto fmt = std::chars_format::general;
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    body.remove_prefix(2);
    fmt = std::chars_format::hex;
  }
  if (body.empty() || body.front() == '-' || body.front() == '+') {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), out, fmt);
  if (ec != std::errc{} || ptr != body.data() + body.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return negative ? -out : out;
}

std::string to_csv(std::span<const forensics::SampleRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += format_hex(r.gamma);
    out += ',';
    out += format_dec(r.gamma);
    out += ',';
    out += format_hex(r.x);
    out += ',';
    out += format_hex(r.value);
    out += ',';
    out += format_dec(r.value);
    out += ',';
    out += format_hex(r.grad);
    out += ',';
    out += format_dec(r.grad);
    out += ',';
    out += forensics::to_string(r.region);
    out += ',';
    if (r.alpha) out += format_dec(*r.alpha);
    out += ',';
    out += format_dec(r.analytic_value);
    out += ',';
    out += format_dec(r.predicted_degenerate);
    out += '\n';
  }
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  if (text.empty()) {
    throw CsvError(1, "empty file");
  }
  std::vector<CsvRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      throw CsvError(line_no, "CRLF line ending; expected LF");
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw CsvError(line_no, "unexpected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      throw CsvError(line_no, "blank row");
    }
    const auto cols = split(line, ',');
    if (cols.size() != kColumns) {
      throw CsvError(line_no, "expected " + std::to_string(kColumns) +
                                  " columns, found " +
                                  std::to_string(cols.size()));
    }
    CsvRow row;
    try {
      row.gamma = parse_double(cols[0]);
      row.x = parse_double(cols[2]);
      row.value = parse_double(cols[3]);
      row.grad = parse_double(cols[5]);
      if (!cols[8].empty()) row.alpha = parse_double(cols[8]);
      row.analytic_value = parse_double(cols[9]);
      row.predicted = parse_double(cols[10]);
    } catch (const std::invalid_argument& e) {
      throw CsvError(line_no, e.what());
    }
    const auto region = forensics::parse_region(cols[7]);
    if (!region) {
      throw CsvError(line_no, "unknown region '" + std::string(cols[7]) + "'");
    }
    row.region = *region;
    rows.push_back(row);
  }
  if (!header_seen) throw CsvError(1, "missing header");
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError(path, "read failed");
  }
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(path, "cannot open for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError(path, "write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path, "cannot replace file");
  }
}

std::vector<forensics::SampleRecord> run_spec(const ExperimentSpec& spec) {
  return forensics::run_experiment(spec.kind, spec.cfg, spec.sweep);
}

RunOutput run_to_files(const ExperimentSpec& spec,
                       const std::filesystem::path& out_dir, bool svg) {
  const auto records = run_spec(spec);
  const std::string csv = to_csv(records);

  RunOutput result;
  result.csv = out_dir / (spec.name + ".csv");
  std::string svg_text;
  if (svg) {
    PlotOptions opts{spec.plot, spec.transform, spec.name};
    svg_text = render_svg(parse_csv(csv), opts);
  }
  write_file(result.csv, csv);
  if (svg) {
    result.svg = out_dir / (spec.name + ".svg");
    write_file(*result.svg, svg_text);
  }
  return result;
}

}  // namespace guarddiv::report

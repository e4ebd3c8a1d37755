#ifndef ATOMWAVE_CSV_HPP
#define ATOMWAVE_CSV_HPP

// Deterministic CSV output. Doubles use the shortest round-trip form from
// std::to_chars, so equal values always produce equal bytes.

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "atomwave/error.hpp"

namespace atomwave {

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  if (r.ec != std::errc{}) fail(ErrorKind::Numerical, "format_double: conversion failed");
  return {buf, r.ptr};
}

/// Parses a double written by format_double (or any plain decimal form).
inline double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double x = 0;
  const char* b = s.data();
  if (!s.empty() && *b == '+') ++b;
  const auto r = std::from_chars(b, s.data() + s.size(), x);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty())
    fail(ErrorKind::InvalidArgument, "not a number: '" + std::string(s) + "'");
  return x;
}

class CsvCell {
 public:
  CsvCell(double x) : text_(format_double(x)) {}
  CsvCell(int x) : text_(std::to_string(x)) {}
  CsvCell(long x) : text_(std::to_string(x)) {}
  CsvCell(std::size_t x) : text_(std::to_string(x)) {}
  CsvCell(const char* s) : text_(s) {}
  CsvCell(std::string s) : text_(std::move(s)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// Writes a header on construction, then one line per row. Cells must not
/// contain commas; every field written by this library is numeric or a label.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::initializer_list<std::string_view> header)
      : file_(path, std::ios::binary), os_(&file_), path_(path), columns_(header.size()) {
    if (!file_) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    write_header(header);
  }
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header)
      : os_(&os), columns_(header.size()) {
    write_header(header);
  }

  void row(std::initializer_list<CsvCell> cells) {
    if (cells.size() != columns_) fail(ErrorKind::InvalidArgument, "CsvWriter: column count mismatch");
    bool first = true;
    for (const auto& c : cells) {
      if (!first) *os_ << ',';
      *os_ << c.text();
      first = false;
    }
    *os_ << '\n';
    if (!*os_) fail(ErrorKind::Io, "write failed: " + path_);
  }

 private:
  void write_header(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) *os_ << ',';
      *os_ << h;
      first = false;
    }
    *os_ << '\n';
  }

  std::ofstream file_;
  std::ostream* os_;
  std::string path_;
  std::size_t columns_;
};

}  // namespace atomwave

#endif  // ATOMWAVE_CSV_HPP

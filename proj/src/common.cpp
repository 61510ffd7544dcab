#include "lenslevel/common.hpp"

#include <atomic>
#include <cstdio>
#include <iostream>

namespace lenslevel {

namespace {

int parse_fixed_digits(std::string_view text, std::string_view whole) {
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw ValidationError("invalid date '" + std::string(whole) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

std::atomic<LogLevel> g_level{LogLevel::info};

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw ValidationError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  const int y = parse_fixed_digits(text.substr(0, 4), text);
  const int m = parse_fixed_digits(text.substr(5, 2), text);
  const int d = parse_fixed_digits(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ValidationError("invalid date '" + std::string(text) + "'");
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

YearMonth parse_year_month(std::string_view text) {
  if (text.size() != 7 || text[4] != '-')
    throw ValidationError("invalid month '" + std::string(text) + "' (expected YYYY-MM)");
  YearMonth ym{parse_fixed_digits(text.substr(0, 4), text),
               static_cast<unsigned>(parse_fixed_digits(text.substr(5, 2), text))};
  if (ym.month < 1 || ym.month > 12) throw ValidationError("invalid month '" + std::string(text) + "'");
  return ym;
}

std::string format_year_month(YearMonth ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", ym.year, ym.month);
  return buf;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
  return out;
}

void set_log_level(LogLevel level) { g_level = level; }

void log(LogLevel level, std::string_view message) {
  if (level < g_level.load()) return;
  static constexpr const char* kTags[] = {"debug", "info", "warn", "error"};
  std::cerr << "[lenslevel " << kTags[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace lenslevel

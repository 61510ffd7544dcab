#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lenslevel::csv {

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
// Each record carries the 1-based line number where it starts.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<Record> read_all(std::istream& in);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace lenslevel::csv

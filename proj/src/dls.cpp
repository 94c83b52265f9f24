#include "cricket/dls.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

#include "cricket/errors.hpp"

namespace cricket {

namespace {

std::size_t cell(int overs_remaining, int wickets_lost) {
  return static_cast<std::size_t>(overs_remaining - 1) * 10 + static_cast<std::size_t>(wickets_lost);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0')
    throw ParseError("line " + std::to_string(line_no) + ": not a number '" + text + "'");
  return v;
}

}  // namespace

double DlsTable::resources_left(int overs_remaining, int wickets_lost) const {
  if (wickets_lost < 0 || wickets_lost > 9)
    throw DomainError("wickets_lost " + std::to_string(wickets_lost) + " outside 0..9");
  if (overs_remaining == 0) return 0.0;
  if (overs_remaining < 0 || overs_remaining > 50)
    throw DomainError("overs_remaining " + std::to_string(overs_remaining) + " outside 0..50");
  return cells_[cell(overs_remaining, wickets_lost)];
}

void DlsTable::set(int overs_remaining, int wickets_lost, double value) {
  if (overs_remaining < 1 || overs_remaining > 50 || wickets_lost < 0 || wickets_lost > 9)
    throw DomainError("DLS cell index out of range");
  cells_[cell(overs_remaining, wickets_lost)] = value;
}

std::vector<std::string> DlsTable::monotonicity_warnings() const {
  std::vector<std::string> out;
  for (int o = 1; o <= 50; ++o)
    for (int w = 1; w <= 9; ++w)
      if (resources_left(o, w) > resources_left(o, w - 1))
        out.push_back("overs_remaining " + std::to_string(o) + ": resources increase from " +
                      std::to_string(w - 1) + " to " + std::to_string(w) + " wickets lost");
  for (int w = 0; w <= 9; ++w)
    for (int o = 2; o <= 50; ++o)
      if (resources_left(o, w) < resources_left(o - 1, w))
        out.push_back("wickets_lost " + std::to_string(w) + ": resources decrease from " +
                      std::to_string(o - 1) + " to " + std::to_string(o) + " overs remaining");
  return out;
}

DlsLoadResult load_dls_table(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::set<int> rows_seen;
  DlsLoadResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields.size() != 11 || fields[0] != "overs_remaining")
        throw ParseError("line " + std::to_string(line_no) +
                         ": header must be overs_remaining,w0,...,w9");
      for (int w = 0; w < 10; ++w)
        if (fields[static_cast<std::size_t>(w) + 1] != "w" + std::to_string(w))
          throw ParseError("line " + std::to_string(line_no) + ": expected column w" +
                           std::to_string(w));
      header_seen = true;
      continue;
    }
    if (fields.size() != 11)
      throw ParseError("line " + std::to_string(line_no) + ": expected 11 columns, found " +
                       std::to_string(fields.size()));
    const double overs = parse_number(fields[0], line_no);
    const int o = static_cast<int>(overs);
    if (o != overs || o < 1 || o > 50)
      throw ParseError("line " + std::to_string(line_no) + ": overs_remaining must be 1..50");
    if (!rows_seen.insert(o).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate overs_remaining " +
                       std::to_string(o));
    for (int w = 0; w < 10; ++w) {
      const double v = parse_number(fields[static_cast<std::size_t>(w) + 1], line_no);
      if (v < 0.0 || v > 1.0)
        throw ParseError("line " + std::to_string(line_no) + ": value outside [0,1]");
      result.table.set(o, w, v);
    }
  }
  if (!header_seen) throw ParseError("empty DLS table");
  if (rows_seen.size() != 50)
    throw ParseError("expected 50 data rows, found " + std::to_string(rows_seen.size()));
  result.warnings = result.table.monotonicity_warnings();
  return result;
}

}  // namespace cricket

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace cricket {

/// Resource table: fraction of scoring resources left by overs remaining (1..50)
/// and wickets lost (0..9).
class DlsTable {
 public:
  DlsTable() = default;

  /// Exact stored cell. overs_remaining == 0 yields 0. Throws DomainError otherwise
  /// out of range.
  double resources_left(int overs_remaining, int wickets_lost) const;

  void set(int overs_remaining, int wickets_lost, double value);

  /// Monotonicity problems; empty for a well-formed published table.
  std::vector<std::string> monotonicity_warnings() const;

  std::size_t cells() const { return cells_.size(); }

 private:
  std::array<double, 50 * 10> cells_{};
};

struct DlsLoadResult {
  DlsTable table;
  std::vector<std::string> warnings;
};

/// CSV with header `overs_remaining,w0,...,w9` and 50 data rows. Wrong shape is a
/// ParseError; a non-monotone table is accepted with warnings.
DlsLoadResult load_dls_table(std::string_view csv);

}  // namespace cricket

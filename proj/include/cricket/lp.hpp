#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace cricket::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Status { Optimal, Unbounded, IterationLimit };

/// Dense bounded-variable primal simplex with Bland's rule.
///
/// Every row is an equality `sum_j a_j x_j = rhs` that names one of its columns as
/// the initial basic variable; that column must be fresh (added after every earlier
/// row) and the start must be primal feasible. Non-basic columns always sit on a
/// finite bound. Columns added later have zero entries in earlier rows.
class BoundedSimplex {
 public:
  /// New non-basic column at `start_at_upper ? upper : lower`.
  std::size_t add_column(double lower, double upper, bool start_at_upper = false);

  /// Adds a row and makes `basic_column` basic in it. Throws InternalError if the
  /// resulting basic value violates its bounds.
  void add_row(std::span<const std::pair<std::size_t, double>> coefficients, double rhs,
               std::size_t basic_column);

  void set_objective(std::vector<double> objective);

  /// Maximises the current objective from the current basis.
  Status maximize(std::size_t max_pivots = 1'000'000);

  double value(std::size_t column) const { return x_[column]; }
  double objective_value() const;
  double reduced_cost(std::size_t column) const;
  bool is_basic(std::size_t column) const { return row_of_[column] >= 0; }

  /// Tightens bounds; the current value must lie inside the new range.
  void set_bounds(std::size_t column, double lower, double upper);

  /// Fixes every non-basic column whose reduced cost is non-zero. After an optimal
  /// solve this restricts the problem to the optimal face.
  void fix_to_optimal_face(double tolerance);

  std::size_t rows() const { return basis_.size(); }
  std::size_t columns() const { return x_.size(); }
  std::size_t pivots() const { return pivots_; }

 private:
  std::vector<double> reduced_costs() const;
  bool at_upper(std::size_t j) const { return x_[j] >= upper_[j]; }

  std::vector<std::vector<double>> tableau_;  // B^-1 A, one vector per row
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<long> row_of_;                  // -1 for non-basic
  std::vector<double> lower_, upper_, x_, objective_;
  std::size_t pivots_ = 0;
};

}  // namespace cricket::lp

#include "cricket/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cricket/errors.hpp"

namespace cricket::lp {

namespace {
constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr std::size_t kParallelRows = 256;
}  // namespace

std::size_t BoundedSimplex::add_column(double lower, double upper, bool start_at_upper) {
  if (lower > upper) throw InternalError("column with lower bound above upper bound");
  const double start = start_at_upper ? upper : lower;
  if (!std::isfinite(start)) throw InternalError("non-basic column must start on a finite bound");
  lower_.push_back(lower);
  upper_.push_back(upper);
  x_.push_back(start);
  objective_.push_back(0.0);
  row_of_.push_back(-1);
  for (auto& row : tableau_) row.push_back(0.0);
  return x_.size() - 1;
}

void BoundedSimplex::add_row(std::span<const std::pair<std::size_t, double>> coefficients,
                             double rhs, std::size_t basic_column) {
  const std::size_t n = x_.size();
  if (basic_column >= n || row_of_[basic_column] >= 0)
    throw InternalError("basic column of a new row must be a fresh non-basic column");
  std::vector<double> row(n, 0.0);
  for (auto [j, a] : coefficients) {
    if (j >= n) throw InternalError("row references unknown column");
    row[j] += a;
  }
  // Express the row in terms of the current non-basic columns.
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const double coef = row[basis_[k]];
    if (coef == 0.0) continue;
    const auto& tk = tableau_[k];
    for (std::size_t j = 0; j < n; ++j) row[j] -= coef * tk[j];
    row[basis_[k]] = 0.0;
    rhs -= coef * rhs_[k];
  }
  const double pivot = row[basic_column];
  if (std::abs(pivot) < kPivotTol) throw InternalError("new row is dependent on the basis");
  for (double& v : row) v /= pivot;
  rhs /= pivot;
  row[basic_column] = 1.0;

  double value = rhs;
  for (std::size_t j = 0; j < n; ++j)
    if (j != basic_column && row_of_[j] < 0) value -= row[j] * x_[j];
  if (value < lower_[basic_column] - kFeasTol || value > upper_[basic_column] + kFeasTol)
    throw InternalError("initial basis of new row is infeasible");
  x_[basic_column] = std::clamp(value, lower_[basic_column], upper_[basic_column]);
  row_of_[basic_column] = static_cast<long>(basis_.size());
  basis_.push_back(basic_column);
  tableau_.push_back(std::move(row));
  rhs_.push_back(rhs);
}

void BoundedSimplex::set_objective(std::vector<double> objective) {
  objective.resize(x_.size(), 0.0);
  objective_ = std::move(objective);
}

std::vector<double> BoundedSimplex::reduced_costs() const {
  std::vector<double> d = objective_;
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const double cb = objective_[basis_[k]];
    if (cb == 0.0) continue;
    const auto& tk = tableau_[k];
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= cb * tk[j];
  }
  for (std::size_t b : basis_) d[b] = 0.0;
  return d;
}

double BoundedSimplex::reduced_cost(std::size_t column) const { return reduced_costs()[column]; }

double BoundedSimplex::objective_value() const {
  double z = 0.0;
  for (std::size_t j = 0; j < x_.size(); ++j) z += objective_[j] * x_[j];
  return z;
}

void BoundedSimplex::set_bounds(std::size_t column, double lower, double upper) {
  if (x_[column] < lower - kFeasTol || x_[column] > upper + kFeasTol)
    throw InternalError("new bounds exclude the current value");
  lower_[column] = lower;
  upper_[column] = upper;
  x_[column] = std::clamp(x_[column], lower, upper);
}

void BoundedSimplex::fix_to_optimal_face(double tolerance) {
  const auto d = reduced_costs();
  for (std::size_t j = 0; j < x_.size(); ++j)
    if (row_of_[j] < 0 && std::abs(d[j]) > tolerance) lower_[j] = upper_[j] = x_[j];
}

Status BoundedSimplex::maximize(std::size_t max_pivots) {
  const std::size_t m = basis_.size();
  const std::size_t n = x_.size();
  for (std::size_t iter = 0; iter < max_pivots; ++iter) {
    const auto d = reduced_costs();
    // Bland: lowest-index improving column.
    std::size_t enter = n;
    double dir = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (row_of_[j] >= 0 || lower_[j] == upper_[j]) continue;
      if (x_[j] <= lower_[j] && d[j] > kOptTol) {
        enter = j;
        dir = 1.0;
        break;
      }
      if (x_[j] >= upper_[j] && d[j] < -kOptTol) {
        enter = j;
        dir = -1.0;
        break;
      }
    }
    if (enter == n) {
      // Recompute basic values from the row equations to shed incremental drift.
      for (std::size_t k = 0; k < m; ++k) {
        double v = rhs_[k];
        const auto& tk = tableau_[k];
        for (std::size_t j = 0; j < n; ++j)
          if (row_of_[j] < 0) v -= tk[j] * x_[j];
        const std::size_t b = basis_[k];
        x_[b] = std::clamp(v, lower_[b], upper_[b]);
      }
      return Status::Optimal;
    }

    double step = upper_[enter] - lower_[enter];
    long leave = -1;
    bool leave_to_upper = false;
    for (std::size_t k = 0; k < m; ++k) {
      const double a = tableau_[k][enter];
      if (std::abs(a) < kPivotTol) continue;
      const std::size_t b = basis_[k];
      const double rate = -a * dir;  // change of x_b per unit step
      double limit;
      bool to_upper;
      if (rate < 0.0) {
        if (!std::isfinite(lower_[b])) continue;
        limit = (x_[b] - lower_[b]) / -rate;
        to_upper = false;
      } else {
        if (!std::isfinite(upper_[b])) continue;
        limit = (upper_[b] - x_[b]) / rate;
        to_upper = true;
      }
      limit = std::max(limit, 0.0);
      if (!std::isfinite(step)) {
        step = limit;
        leave = static_cast<long>(k);
        leave_to_upper = to_upper;
        continue;
      }
      const double tie = 1e-12 * std::max(1.0, std::abs(step));
      if (limit < step - tie ||
          (std::abs(limit - step) <= tie && leave >= 0 && b < basis_[static_cast<std::size_t>(leave)])) {
        step = limit;
        leave = static_cast<long>(k);
        leave_to_upper = to_upper;
      }
    }
    if (!std::isfinite(step)) return Status::Unbounded;

    x_[enter] += dir * step;
    for (std::size_t k = 0; k < m; ++k) x_[basis_[k]] -= tableau_[k][enter] * dir * step;
    ++pivots_;
    if (leave < 0) {
      x_[enter] = dir > 0 ? upper_[enter] : lower_[enter];
      continue;
    }

    const auto r = static_cast<std::size_t>(leave);
    const std::size_t out = basis_[r];
    x_[out] = leave_to_upper ? upper_[out] : lower_[out];
    row_of_[out] = -1;
    basis_[r] = enter;
    row_of_[enter] = static_cast<long>(r);

    auto& pivot_row = tableau_[r];
    const double p = pivot_row[enter];
    for (double& v : pivot_row) v /= p;
    rhs_[r] /= p;
    pivot_row[enter] = 1.0;
    const auto rows = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m >= kParallelRows)
    for (long kk = 0; kk < rows; ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      if (k == r) continue;
      auto& row = tableau_[k];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) row[j] -= f * pivot_row[j];
      row[enter] = 0.0;
      rhs_[k] -= f * rhs_[r];
    }
  }
  return Status::IterationLimit;
}

}  // namespace cricket::lp

#include "bellrank/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellrank {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-8;

struct Tableau {
  std::size_t m = 0;                     // rows
  std::size_t n = 0;                     // columns (variables), rhs excluded
  std::vector<std::vector<double>> a;    // m x (n+1), last column is rhs
  std::vector<std::size_t> basis;        // basic variable per row

  void pivot(std::size_t row, std::size_t col) {
    const double piv = a[row][col];
    for (std::size_t j = 0; j <= n; ++j) a[row][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      const double factor = a[i][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) a[i][j] -= factor * a[row][j];
    }
    basis[row] = col;
  }
};

// Minimize c.x over the tableau's feasible region starting from the current
// basis. Bland's rule: entering = lowest-index negative reduced cost,
// leaving = lowest-index row among minimum-ratio ties.
LpStatus run_simplex(Tableau& t, const std::vector<double>& cost) {
  for (;;) {
    std::vector<double> reduced(t.n);
    for (std::size_t j = 0; j < t.n; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < t.m; ++i) {
        z += cost[t.basis[i]] * t.a[i][j];
      }
      reduced[j] = cost[j] - z;
    }

    std::size_t entering = t.n;
    for (std::size_t j = 0; j < t.n; ++j) {
      if (reduced[j] < -kPivotEps) {
        entering = j;
        break;
      }
    }
    if (entering == t.n) return LpStatus::kOptimal;

    std::size_t leaving = t.m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.m; ++i) {
      if (t.a[i][entering] > kPivotEps) {
        const double ratio = t.a[i][t.n] / t.a[i][entering];
        if (ratio < best_ratio - kPivotEps ||
            (ratio < best_ratio + kPivotEps &&
             (leaving == t.m || t.basis[i] < t.basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving == t.m) return LpStatus::kUnbounded;

    t.pivot(leaving, entering);
  }
}

}  // namespace

LpSolution solve_lp(const std::vector<double>& objective,
                    const std::vector<LpConstraint>& constraints) {
  const std::size_t n_vars = objective.size();
  const std::size_t m = constraints.size();
  for (const auto& c : constraints) {
    if (c.coeffs.size() != n_vars) {
      throw std::invalid_argument("solve_lp: constraint arity mismatch");
    }
  }

  // Standard form: rhs >= 0, slack for <=, surplus for >=, artificials as
  // needed to complete the starting basis.
  struct Row {
    std::vector<double> coeffs;
    LpRelation relation;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(m);
  for (const auto& c : constraints) {
    Row r{c.coeffs, c.relation, c.rhs};
    if (r.rhs < 0.0) {
      for (auto& v : r.coeffs) v = -v;
      r.rhs = -r.rhs;
      if (r.relation == LpRelation::kLessEqual) {
        r.relation = LpRelation::kGreaterEqual;
      } else if (r.relation == LpRelation::kGreaterEqual) {
        r.relation = LpRelation::kLessEqual;
      }
    }
    rows.push_back(std::move(r));
  }

  std::size_t n_slack = 0;
  for (const auto& r : rows) {
    if (r.relation != LpRelation::kEqual) ++n_slack;
  }

  Tableau t;
  t.m = m;
  t.n = n_vars + n_slack;  // artificial columns appended below
  std::vector<std::size_t> artificial_rows;

  std::size_t slack_at = n_vars;
  t.a.assign(m, std::vector<double>(t.n + 1, 0.0));
  t.basis.assign(m, 0);
  std::vector<bool> row_needs_artificial(m, false);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n_vars; ++j) t.a[i][j] = rows[i].coeffs[j];
    t.a[i][t.n] = rows[i].rhs;
    switch (rows[i].relation) {
      case LpRelation::kLessEqual:
        t.a[i][slack_at] = 1.0;
        t.basis[i] = slack_at;
        ++slack_at;
        break;
      case LpRelation::kGreaterEqual:
        t.a[i][slack_at] = -1.0;
        ++slack_at;
        row_needs_artificial[i] = true;
        break;
      case LpRelation::kEqual:
        row_needs_artificial[i] = true;
        break;
    }
  }

  std::size_t n_artificial = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (row_needs_artificial[i]) ++n_artificial;
  }

  if (n_artificial > 0) {
    const std::size_t art_at = t.n;
    t.n += n_artificial;
    std::size_t next = art_at;
    for (std::size_t i = 0; i < m; ++i) {
      t.a[i].insert(t.a[i].end() - 1, n_artificial, 0.0);
      if (row_needs_artificial[i]) {
        t.a[i][next] = 1.0;
        t.basis[i] = next;
        artificial_rows.push_back(i);
        ++next;
      }
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1_cost(t.n, 0.0);
    for (std::size_t j = art_at; j < t.n; ++j) phase1_cost[j] = 1.0;
    const LpStatus s1 = run_simplex(t, phase1_cost);
    if (s1 == LpStatus::kUnbounded) {
      throw std::logic_error("solve_lp: phase 1 unbounded");
    }
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.m; ++i) {
      if (t.basis[i] >= art_at) infeasibility += t.a[i][t.n];
    }
    if (infeasibility > kFeasEps) {
      return {LpStatus::kInfeasible, {}, 0.0};
    }

    // Pivot remaining zero-level artificials out of the basis; rows that
    // cannot be pivoted are redundant and get dropped.
    for (std::size_t i = 0; i < t.m;) {
      if (t.basis[i] < art_at) {
        ++i;
        continue;
      }
      std::size_t col = art_at;
      for (std::size_t j = 0; j < art_at; ++j) {
        if (std::fabs(t.a[i][j]) > kPivotEps) {
          col = j;
          break;
        }
      }
      if (col < art_at) {
        t.pivot(i, col);
        ++i;
      } else {
        t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
        --t.m;
      }
    }

    // Drop artificial columns.
    for (auto& row : t.a) {
      row.erase(row.begin() + static_cast<std::ptrdiff_t>(art_at),
                row.begin() + static_cast<std::ptrdiff_t>(t.n));
    }
    t.n = art_at;
  }

  std::vector<double> phase2_cost(t.n, 0.0);
  for (std::size_t j = 0; j < n_vars; ++j) phase2_cost[j] = objective[j];
  const LpStatus s2 = run_simplex(t, phase2_cost);
  if (s2 == LpStatus::kUnbounded) {
    return {LpStatus::kUnbounded, {}, 0.0};
  }

  std::vector<double> x(n_vars, 0.0);
  for (std::size_t i = 0; i < t.m; ++i) {
    if (t.basis[i] < n_vars) x[t.basis[i]] = t.a[i][t.n];
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n_vars; ++j) obj += objective[j] * x[j];
  return {LpStatus::kOptimal, std::move(x), obj};
}

}  // namespace bellrank

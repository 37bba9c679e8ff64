#pragma once

#include <cstddef>
#include <vector>

namespace bellrank {

// Dense two-phase primal simplex for small linear programs:
//
//   minimize    c . x
//   subject to  A x (<= | = | >=) b,   x >= 0
//
// Bland's rule is used throughout, so the method cannot cycle. Intended for
// problems with tens of variables; no sparsity, no presolve.

enum class LpRelation { kLessEqual, kEqual, kGreaterEqual };

struct LpConstraint {
  std::vector<double> coeffs;
  LpRelation relation;
  double rhs;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status;
  std::vector<double> x;
  double objective;
};

LpSolution solve_lp(const std::vector<double>& objective,
                    const std::vector<LpConstraint>& constraints);

}  // namespace bellrank

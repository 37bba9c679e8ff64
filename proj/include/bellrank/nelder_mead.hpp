#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bellrank {

// Derivative-free simplex minimizer (Nelder-Mead with standard coefficients).
// Deterministic: no randomized restarts, fixed initial simplex.

struct NelderMeadOptions {
  double initial_step = 0.5;
  // Stop once a full iteration can improve the incumbent by less than this;
  // operationally, when the simplex value spread falls below
  // max(tolerance, 32*eps*|f_best|).
  double tolerance = 1e-10;
  int max_iterations = 600;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;  // stopped by tolerance, not the iteration cap
};

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace bellrank

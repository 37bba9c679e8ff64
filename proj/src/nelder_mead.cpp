#include "bellrank/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bellrank {

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) {
    throw std::invalid_argument("nelder_mead: empty start point");
  }

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  NelderMeadResult result;

  std::vector<std::vector<double>> simplex(dim + 1,
                                           std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;

  std::vector<double> values(dim + 1);
  auto eval = [&](std::span<const double> x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    ++result.iterations;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const std::size_t best = order[0];
    const std::size_t worst = order[dim];
    const std::size_t second_worst = order[dim - 1];

    const double spread = values[worst] - values[best];
    const double scale =
        std::fmax(options.tolerance,
                  32.0 * std::numeric_limits<double>::epsilon() *
                      std::fabs(values[best]));
    if (spread <= scale && std::isfinite(values[worst])) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> point(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        point[d] = centroid[d] + coeff * (centroid[d] - simplex[worst][d]);
      }
      return point;
    };

    const auto reflected = blend(kReflect);
    const double f_reflected = eval(reflected);

    if (f_reflected < values[best]) {
      const auto expanded = blend(kExpand);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[worst];
    const auto contracted = blend(outside ? kContract : -kContract);
    const double f_contracted = eval(contracted);
    if (f_contracted < std::fmin(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[i][d] =
            simplex[best][d] + kShrink * (simplex[i][d] - simplex[best][d]);
      }
      values[i] = eval(simplex[i]);
    }
  }

  const std::size_t best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace bellrank

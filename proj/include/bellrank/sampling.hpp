#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bellrank/rng.hpp"

namespace bellrank {

// Exact inverse-CDF binomial draw. Starts the search at the mode so the
// expected cost is O(sqrt(n p (1-p))) rather than O(n p).
std::uint64_t binomial_draw(std::uint64_t n, double p, Xoshiro256pp& rng);

// Multinomial draw by chained conditional binomials. `probs` need not be
// normalized; negative entries are rejected.
std::vector<std::uint64_t> multinomial_draw(std::uint64_t n,
                                            std::span<const double> probs,
                                            Xoshiro256pp& rng);

}  // namespace bellrank

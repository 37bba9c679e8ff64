#include "bellrank/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "bellrank/special.hpp"

namespace bellrank {

std::uint64_t binomial_draw(std::uint64_t n, double p, Xoshiro256pp& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial_draw: p outside [0,1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double u = rng.u01();

  std::uint64_t k = static_cast<std::uint64_t>(
      std::fmin(static_cast<double>(n),
                std::floor(static_cast<double>(n + 1) * p)));
  double pmf = std::exp(binomial_log_pmf(k, n, p));
  double cdf = binomial_cdf(k, n, p);
  const double odds = p / (1.0 - p);

  if (u <= cdf) {
    // Walk down: find smallest k with CDF(k) >= u.
    while (k > 0 && u <= cdf - pmf) {
      cdf -= pmf;
      pmf *= static_cast<double>(k) /
             (static_cast<double>(n - k + 1) * odds);
      --k;
    }
    return k;
  }
  // Walk up.
  while (k < n && u > cdf) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
    cdf += pmf;
    ++k;
  }
  return k;
}

std::vector<std::uint64_t> multinomial_draw(std::uint64_t n,
                                            std::span<const double> probs,
                                            Xoshiro256pp& rng) {
  const std::size_t m = probs.size();
  std::vector<std::uint64_t> counts(m, 0);
  if (m == 0) {
    if (n != 0) {
      throw std::invalid_argument("multinomial_draw: no categories");
    }
    return counts;
  }

  // Suffix sums keep the conditional probabilities well-conditioned and
  // guarantee the last positive cell absorbs whatever remains.
  std::vector<double> suffix(m + 1, 0.0);
  std::size_t last_positive = m;
  for (std::size_t j = m; j-- > 0;) {
    if (!(probs[j] >= 0.0)) {
      throw std::invalid_argument("multinomial_draw: negative probability");
    }
    suffix[j] = suffix[j + 1] + probs[j];
    if (probs[j] > 0.0 && last_positive == m) last_positive = j;
  }
  if (suffix[0] <= 0.0) {
    throw std::invalid_argument("multinomial_draw: zero total probability");
  }

  std::uint64_t remaining = n;
  for (std::size_t j = 0; j < m && remaining > 0; ++j) {
    if (probs[j] <= 0.0) continue;
    if (j == last_positive) {
      counts[j] = remaining;
      remaining = 0;
      break;
    }
    double cond = probs[j] / suffix[j];
    if (cond > 1.0) cond = 1.0;
    const std::uint64_t c = binomial_draw(remaining, cond, rng);
    counts[j] = c;
    remaining -= c;
  }
  return counts;
}

}  // namespace bellrank

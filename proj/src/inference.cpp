#include "bellrank/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "bellrank/errors.hpp"
#include "bellrank/rng.hpp"
#include "bellrank/sampling.hpp"
#include "bellrank/special.hpp"

namespace bellrank {

std::string to_string(IntervalMethod method) {
  return method == IntervalMethod::kBootstrapPercentile ? "BOOTSTRAP_PERCENTILE"
                                                        : "PERMUTATION_NULL";
}

namespace {

void require_blocks_nonempty(const OutcomeCountTable& counts) {
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (counts.block_total(x, y) == 0) throw EmptyBlockError(x, y);
    }
  }
}

// Linear interpolation between order statistics (the common "type 7" rule);
// any fixed rule works, it just has to be one rule.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double chsh_of_counts(const OutcomeCountTable& counts,
                      const SignConvention& convention) {
  return chsh_value(correlation_matrix(normalize_counts(counts)), convention);
}

double chsh_max_abs_of_counts(const OutcomeCountTable& counts) {
  return chsh_report(correlation_matrix(normalize_counts(counts))).s_max_abs;
}

template <typename Statistic>
IntervalEstimate bootstrap_ci_impl(const OutcomeCountTable& counts,
                                   int n_resamples, std::uint64_t seed,
                                   double level, Statistic statistic) {
  require_blocks_nonempty(counts);
  if (n_resamples < 100) {
    throw TooFewSamplesError("bootstrap needs at least 100 resamples");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0,1)");
  }

  std::array<std::array<double, 4>, 4> block_probs{};
  std::array<std::uint64_t, 4> block_sizes{};
  for (int block = 0; block < 4; ++block) {
    block_sizes[block] =
        counts.block_total(block >> 1, block & 1);
    for (int cell = 0; cell < 4; ++cell) {
      block_probs[block][cell] =
          static_cast<double>(counts.cells()[static_cast<std::size_t>(block * 4 + cell)]) /
          static_cast<double>(block_sizes[block]);
    }
  }

  std::vector<double> replicates;
  replicates.reserve(static_cast<std::size_t>(n_resamples));
  int degenerate = 0;
  for (int i = 0; i < n_resamples; ++i) {
    Xoshiro256pp rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    OutcomeCountTable resampled;
    for (int block = 0; block < 4; ++block) {
      const auto draws =
          multinomial_draw(block_sizes[block], block_probs[block], rng);
      for (int cell = 0; cell < 4; ++cell) {
        resampled.set(block >> 1, block & 1, outcome_from_bit(cell >> 1),
                      outcome_from_bit(cell & 1), draws[static_cast<std::size_t>(cell)]);
      }
    }
    const double s = statistic(resampled);
    if (std::isfinite(s)) {
      replicates.push_back(s);
    } else {
      ++degenerate;
    }
  }
  // Multinomial resampling of nonempty blocks cannot produce an undefined
  // replicate; the guard stays for alternate resamplers behind Statistic.
  if (degenerate * 2 > n_resamples) {
    throw DegenerateResamplesError(
        std::to_string(degenerate) + " of " + std::to_string(n_resamples) +
        " replicates were undefined");
  }

  std::sort(replicates.begin(), replicates.end());
  const double alpha = 1.0 - level;
  IntervalEstimate estimate;
  estimate.point = statistic(counts);
  estimate.lower = quantile_sorted(replicates, alpha / 2.0);
  estimate.upper = quantile_sorted(replicates, 1.0 - alpha / 2.0);
  estimate.level = level;
  estimate.method = IntervalMethod::kBootstrapPercentile;
  return estimate;
}

}  // namespace

IntervalEstimate bootstrap_ci_chsh(const OutcomeCountTable& counts,
                                   const SignConvention& convention,
                                   int n_resamples, std::uint64_t seed,
                                   double level) {
  return bootstrap_ci_impl(counts, n_resamples, seed, level,
                           [&convention](const OutcomeCountTable& c) {
                             return chsh_of_counts(c, convention);
                           });
}

IntervalEstimate bootstrap_ci_chsh_max(const OutcomeCountTable& counts,
                                       int n_resamples, std::uint64_t seed,
                                       double level) {
  return bootstrap_ci_impl(counts, n_resamples, seed, level,
                           [](const OutcomeCountTable& c) {
                             return chsh_max_abs_of_counts(c);
                           });
}

ParticipantChshResult participant_level_chsh(std::span<const TrialRecord> trials,
                                             const SignConvention& convention) {
  std::map<std::string, OutcomeCountTable> per_participant;
  for (const auto& trial : trials) {
    per_participant[trial.participant_id].add(trial.x, trial.y, trial.a,
                                              trial.b);
  }

  ParticipantChshResult result;
  for (const auto& [id, counts] : per_participant) {
    bool complete = true;
    std::array<std::uint64_t, 4> per_block{};
    for (int block = 0; block < 4; ++block) {
      per_block[block] = counts.block_total(block >> 1, block & 1);
      if (per_block[block] == 0) complete = false;
    }
    if (!complete) {
      result.excluded.push_back(id);
      continue;
    }
    ParticipantChsh entry;
    entry.participant_id = id;
    entry.s = chsh_of_counts(counts, convention);
    entry.n_per_block = per_block;
    result.included.push_back(std::move(entry));
  }
  if (result.included.empty()) {
    throw NoEligibleParticipantsError();
  }
  return result;
}

TTestResult naive_t_test(std::span<const double> per_unit_s, double null_value) {
  const std::size_t n = per_unit_s.size();
  if (n < 2) {
    throw TooFewSamplesError("t-test needs at least 2 values");
  }
  const double mean =
      std::accumulate(per_unit_s.begin(), per_unit_s.end(), 0.0) /
      static_cast<double>(n);
  double ss = 0.0;
  for (double v : per_unit_s) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw ZeroVarianceError();
  }
  TTestResult result;
  result.df = static_cast<int>(n - 1);
  result.t = (mean - null_value) / (sd / std::sqrt(static_cast<double>(n)));
  const double tail = 1.0 - student_t_cdf(std::fabs(result.t),
                                          static_cast<double>(result.df));
  result.p_two_sided = std::fmin(1.0, 2.0 * tail);
  return result;
}

PermutationTestResult permutation_test_chsh(std::span<const TrialRecord> trials,
                                            const SignConvention& convention,
                                            int n_permutations,
                                            std::uint64_t seed) {
  if (n_permutations < 0) {
    throw std::invalid_argument("n_permutations must be nonnegative");
  }
  OutcomeCountTable observed_counts;
  for (const auto& trial : trials) {
    observed_counts.add(trial.x, trial.y, trial.a, trial.b);
  }
  require_blocks_nonempty(observed_counts);

  const double observed_s = chsh_of_counts(observed_counts, convention);
  const double observed_abs = std::fabs(observed_s);

  std::vector<std::pair<int, int>> settings;
  std::vector<std::pair<int, int>> outcomes;
  settings.reserve(trials.size());
  outcomes.reserve(trials.size());
  for (const auto& trial : trials) {
    settings.emplace_back(trial.x, trial.y);
    outcomes.emplace_back(trial.a, trial.b);
  }

  int n_at_least = 0;
  for (int i = 0; i < n_permutations; ++i) {
    Xoshiro256pp rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    auto shuffled = outcomes;
    for (std::size_t j = shuffled.size(); j > 1; --j) {
      const std::size_t k = rng.below(j);
      std::swap(shuffled[j - 1], shuffled[k]);
    }
    OutcomeCountTable permuted;
    for (std::size_t j = 0; j < shuffled.size(); ++j) {
      permuted.add(settings[j].first, settings[j].second, shuffled[j].first,
                   shuffled[j].second);
    }
    if (std::fabs(chsh_of_counts(permuted, convention)) >= observed_abs) {
      ++n_at_least;
    }
  }

  PermutationTestResult result;
  result.observed_s = observed_s;
  result.n_permutations = n_permutations;
  result.p = (1.0 + static_cast<double>(n_at_least)) /
             (1.0 + static_cast<double>(n_permutations));
  return result;
}

}  // namespace bellrank

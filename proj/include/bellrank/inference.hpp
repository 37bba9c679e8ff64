#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bellrank/behavior.hpp"
#include "bellrank/chsh.hpp"

namespace bellrank {

// One trial of one participant.
struct TrialRecord {
  std::string participant_id;
  int x = 0;
  int y = 0;
  int a = 1;
  int b = 1;
};

enum class IntervalMethod { kBootstrapPercentile, kPermutationNull };

std::string to_string(IntervalMethod method);

struct IntervalEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  IntervalMethod method = IntervalMethod::kBootstrapPercentile;
};

// Percentile bootstrap for S. Each (x,y) block is resampled as a multinomial
// with its observed size; settings are treated as fixed by design. Replicate
// i draws from a stream seeded by a stable hash of (seed, i), so the result
// is deterministic regardless of execution order. Requires all four blocks
// nonempty and n_resamples >= 100.
IntervalEstimate bootstrap_ci_chsh(const OutcomeCountTable& counts,
                                   const SignConvention& convention,
                                   int n_resamples, std::uint64_t seed,
                                   double level);

// Same resampling scheme, statistic = max over the 8 conventions of |S|.
IntervalEstimate bootstrap_ci_chsh_max(const OutcomeCountTable& counts,
                                       int n_resamples, std::uint64_t seed,
                                       double level);

struct ParticipantChsh {
  std::string participant_id;
  double s = 0.0;
  std::array<std::uint64_t, 4> n_per_block{};  // indexed x*2+y
};

struct ParticipantChshResult {
  std::vector<ParticipantChsh> included;
  std::vector<std::string> excluded;  // participants missing some block
};

// Per-participant S from each participant's own empirical correlators.
// Participants missing any block are listed as excluded, never imputed.
ParticipantChshResult participant_level_chsh(std::span<const TrialRecord> trials,
                                             const SignConvention& convention);

struct TTestResult {
  double t = 0.0;
  double p_two_sided = 1.0;
  int df = 0;
};

// One-sample t-test of mean(per_unit_s) against null_value. Provided for
// side-by-side comparison with the resampling intervals; its iid-normal
// assumptions are the caller's responsibility.
TTestResult naive_t_test(std::span<const double> per_unit_s, double null_value);

struct PermutationTestResult {
  double observed_s = 0.0;
  double p = 1.0;
  int n_permutations = 0;
};

// Null of "no setting dependence": outcome pairs (a,b) are shuffled across
// the pooled trials' setting labels, preserving outcome margins and block
// sizes. p = (1 + #{permuted |S| >= observed |S|}) / (n_permutations + 1).
PermutationTestResult permutation_test_chsh(std::span<const TrialRecord> trials,
                                            const SignConvention& convention,
                                            int n_permutations,
                                            std::uint64_t seed);

}  // namespace bellrank

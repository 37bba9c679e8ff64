#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bellrank {

// Discrete rank-frequency families. All are normalized over the finite
// support 1..V, which keeps every family a proper distribution under one
// shared multinomial likelihood. Unnormalized shapes:
//
//   BE_RANK                w(i) = 1 / (A*e^{i/B} - 1),  B > 0, A > e^{-1/B}
//   MB_EXPONENTIAL         w(i) = e^{-i/B},             B > 0
//   ZIPF                   w(i) = i^{-s},               s > 0
//   ZIPF_MANDELBROT        w(i) = (i+q)^{-s},           s > 0, q > -1
//   DISCRETE_LOGNORMAL     w(i) = exp(-(ln i - mu)^2 / (2 sigma^2)) / i, sigma > 0
//   STRETCHED_EXPONENTIAL  w(i) = e^{-(i/lambda)^beta}, lambda > 0, 0 < beta <= 1
//   YULE_SIMON             w(i) = Beta(i, rho+1),       rho > 0
enum class Family {
  kBeRank,
  kMbExponential,
  kZipf,
  kZipfMandelbrot,
  kDiscreteLognormal,
  kStretchedExponential,
  kYuleSimon,
};

std::string family_name(Family family);
Family family_from_name(const std::string& name);
const std::vector<Family>& all_families();
int family_param_count(Family family);
std::vector<std::string> family_param_names(Family family);

struct RankEntry {
  std::uint64_t rank = 0;   // >= 1
  std::uint64_t count = 0;  // >= 0
};

// (rank, count) pairs with strictly increasing ranks, plus the support size V
// (>= max rank) over which the families are normalized.
class RankTable {
 public:
  RankTable() = default;
  RankTable(std::vector<RankEntry> entries, std::uint64_t support);

  const std::vector<RankEntry>& entries() const { return entries_; }
  std::uint64_t support() const { return support_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t max_rank() const {
    return entries_.empty() ? 0 : entries_.back().rank;
  }

 private:
  std::vector<RankEntry> entries_;
  std::uint64_t support_ = 0;
  std::uint64_t total_ = 0;
};

struct FamilySpec {
  Family family = Family::kZipf;
  std::map<std::string, double> params;
  std::uint64_t support = 0;  // V

  double param(const std::string& name) const;
};

// Throws ParamOutOfDomainError when params violate the family domain.
void validate_params(const FamilySpec& spec);

// Unnormalized log weight at rank i (domain-checked).
double log_weight(const FamilySpec& spec, std::uint64_t i);

// log sum_{j=1..V} w(j).
double log_normalizer(const FamilySpec& spec);

// w(i) / sum_j w(j). Throws RankOutOfSupportError outside 1..V.
double pmf(const FamilySpec& spec, std::uint64_t i);

// Multinomial log-likelihood sum_i n_i ln pmf(i), omitting the data-only
// combinatorial constant (consistently across families). Empty table -> 0.
double loglik(const FamilySpec& spec, const RankTable& table);

struct OptimizerConfig {
  int starts_per_dim = 5;          // lattice points per parameter dimension
  double start_agreement = 1e-6;   // best-two-starts gap for the converged flag
  double nm_tolerance = 1e-10;     // per-start stop (see nelder_mead.hpp)
  int nm_max_iterations = 600;
  bool parallel_starts = true;     // starts are independent; aggregation is
                                   // by (loglik, start index), so results do
                                   // not depend on scheduling
};

struct FitTraceSummary {
  int n_starts = 0;
  long n_evaluations = 0;
  int best_start = -1;
  double best_pair_gap = 0.0;  // loglik gap between the two best starts
};

struct FitResult {
  FamilySpec spec;
  double loglik = 0.0;
  double aic = 0.0;  // 2k - 2 loglik
  double bic = 0.0;  // k ln N - 2 loglik
  int k = 0;
  bool converged = false;
  FitTraceSummary trace;
};

// Maximum-likelihood fit over an unconstrained reparameterization of the
// family's domain, multi-started from a log-spaced lattice (starts_per_dim
// points per dimension; lattices documented in rankfit.cpp). Throws
// OptimizationFailedError if no start yields a finite log-likelihood.
FitResult fit_mle(Family family, const RankTable& table, std::uint64_t support,
                  const OptimizerConfig& config = {});

struct ModelSelection {
  std::vector<FitResult> ranked;  // by AIC, ties by k then family name
  std::vector<std::pair<Family, std::string>> failed;
};

// Fits each family and ranks by AIC (BIC also reported). Per-family
// optimization failures become exclusions; throws only if every family fails
// or fewer than two families are requested.
ModelSelection model_select(const RankTable& table,
                            const std::vector<Family>& families,
                            std::uint64_t support,
                            const OptimizerConfig& config = {});

// Log-likelihood of frozen fitted params on held-out counts. Throws
// RankOutOfSupportError if the test table exceeds the fitted support.
double holdout_loglik(const FitResult& fit, const RankTable& test_table);

// Closed-form approximants to the BE-rank weight, unnormalized:
// small-rank form 1/((A-1) + (A/B) i) and tail form (1/A) e^{-i/B}.
double be_small_i_approx(double a_param, double b_param, std::uint64_t i);
double be_tail_approx(double a_param, double b_param, std::uint64_t i);

struct RankInterval {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
};

struct RegimeReport {
  double small_i_max_rel_err = 0.0;  // small-rank form vs exact, observed ranks
  double tail_max_rel_err = 0.0;     // exponential tail form vs exact
  double i_over_b_max = 0.0;         // (max observed rank) / B
  double a_minus_1 = 0.0;
  // Widest observed-rank window where the exact weight matches const/i
  // within zipf_window_threshold; nullopt when no rank qualifies.
  std::optional<RankInterval> zipf_window;
  double zipf_window_threshold = 0.05;
};

// Diagnostics for how Zipf-like a fitted BE-rank curve is across the
// observed ranks. The tail error is taken over ranks with A*e^{i/B} >= 10
// (falling back to the largest observed rank when none qualify).
RegimeReport zipf_regime_report(const FamilySpec& spec, RankInterval observed);

struct LevelEntry {
  std::uint64_t n = 0;  // level index, strictly increasing
  double energy = 0.0;  // > 0
};

struct SpacingFit {
  double d = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of ln E_n against ln n, i.e. the exponent d in
// E_n proportional to n^d. Requires >= 3 strictly positive levels.
SpacingFit spacing_exponent(std::span<const LevelEntry> levels);

// Multinomial draw of `total` observations from the family's pmf; zero-count
// ranks are omitted. Deterministic given the seed.
RankTable sample_rank_table(const FamilySpec& spec, std::uint64_t total,
                            std::uint64_t seed);

}  // namespace bellrank

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace bellrank {

// Bipartite binary-setting, binary-outcome measurement statistics.
//
// Outcomes are stored as +/-1 throughout. Bit-valued encodings (0/1) map
// through a = (-1)^bit at ingestion, so bit 0 is +1 and bit 1 is -1. Cells
// are indexed ((x*2 + y)*2 + bit(a))*2 + bit(b).

inline constexpr double kProbTolerance = 1e-12;

int outcome_from_bit(int bit);
int bit_from_outcome(int outcome);

std::size_t cell_index(int x, int y, int a, int b);

// Raw trial tallies n(a,b|x,y). A block (x,y) with total 0 is "unobserved";
// analysis operations reject such blocks rather than imputing them.
class OutcomeCountTable {
 public:
  OutcomeCountTable() = default;

  std::uint64_t count(int x, int y, int a, int b) const;
  void set(int x, int y, int a, int b, std::uint64_t n);
  void add(int x, int y, int a, int b, std::uint64_t n = 1);

  std::uint64_t block_total(int x, int y) const;
  std::uint64_t total() const;

  const std::array<std::uint64_t, 16>& cells() const { return cells_; }

  bool operator==(const OutcomeCountTable&) const = default;

 private:
  std::array<std::uint64_t, 16> cells_{};
};

// Conditional distributions P(a,b|x,y). Immutable; construction validates
// that every block sums to 1 within kProbTolerance and no entry is negative.
// Validation rejects, it never renormalizes.
class BehaviorTable {
 public:
  static BehaviorTable from_cells(const std::array<double, 16>& cells);

  double prob(int x, int y, int a, int b) const;
  // P(a|x,y) and P(b|x,y)
  double marginal_a(int x, int y, int a) const;
  double marginal_b(int x, int y, int b) const;

  const std::array<double, 16>& cells() const { return cells_; }

 private:
  explicit BehaviorTable(const std::array<double, 16>& cells)
      : cells_(cells) {}
  std::array<double, 16> cells_;
};

// E(A_x B_y) for all four setting pairs.
struct CorrelationMatrix {
  std::array<std::array<double, 2>, 2> e{};

  static CorrelationMatrix from_values(double e00, double e01, double e10,
                                       double e11);
};

// Hidden-variable model: a distribution over labels lambda, a joint response
// P(a,b|x,y,lambda) per label, and optionally setting-dependent label weights
// P(lambda|x,y) for probing measurement independence.
struct HiddenVariableModel {
  struct Response {
    // joint[x][y][bit(a)*2 + bit(b)]
    std::array<std::array<std::array<double, 4>, 2>, 2> joint{};
  };

  std::map<std::string, double> lambda_weights;
  std::map<std::string, Response> responses;
  // weights_given_setting[x*2+y] is a distribution over the same labels.
  std::optional<std::array<std::map<std::string, double>, 4>>
      setting_dependent_weights;

  void validate() const;
};

// Empirical conditional distribution per block. Throws EmptyBlockError when
// a block was never probed.
BehaviorTable normalize_counts(const OutcomeCountTable& counts);

// Sum_{a,b} a*b*P(a,b|x,y).
double correlator(const BehaviorTable& behavior, int x, int y);

CorrelationMatrix correlation_matrix(const BehaviorTable& behavior);

// Max over parties, outcomes and settings of the shift in a single-party
// marginal when the remote setting changes. Zero means nonsignalling.
double nonsignalling_residual(const BehaviorTable& behavior);

// Max over (lambda,x,y,a,b) of |P(a,b|x,y,lambda) - P(a|x,lambda)P(b|y,lambda)|
// with the single-party factors taken as marginals of the joint response.
double factorization_residual(const HiddenVariableModel& model);

// Max over (lambda,x,y) of |P(lambda|x,y) - P(lambda)| where P(lambda) is the
// average over the four setting pairs under uniform setting choice. Throws
// MissingSettingWeightsError when the model has no setting-dependent weights.
double measurement_independence_residual(const HiddenVariableModel& model);

}  // namespace bellrank

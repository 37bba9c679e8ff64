#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "bellrank/behavior.hpp"

namespace bellrank {

// Classification tolerance at each bound. Values within kClassifyEps of a
// boundary classify into the smaller region, so a numerically computed
// 2*sqrt(2) never reads as supra-quantum.
inline constexpr double kClassifyEps = 1e-9;

inline constexpr double kLocalBound = 2.0;
inline constexpr double kTsirelsonBound = 2.8284271247461903;  // 2*sqrt(2)
inline constexpr double kAlgebraicBound = 4.0;

// One of the 8 valid sign placements over (E00, E01, E10, E11): exactly one
// or exactly three minus signs.
class SignConvention {
 public:
  static SignConvention from_signs(const std::array<int, 4>& signs);
  static SignConvention from_string(std::string_view s);  // e.g. "+++-"
  static const std::array<SignConvention, 8>& all();

  const std::array<int, 4>& signs() const { return signs_; }
  std::string str() const;

  bool operator==(const SignConvention&) const = default;

 private:
  explicit SignConvention(const std::array<int, 4>& signs) : signs_(signs) {}
  std::array<int, 4> signs_;
};

enum class BoundClass { kLocal, kQuantumCompatible, kSupraQuantum, kInvalid };

std::string to_string(BoundClass c);

struct ChshReport {
  std::map<std::string, double> s_by_convention;  // keyed by sign string
  double s_max_abs = 0.0;
  BoundClass classification = BoundClass::kInvalid;
};

// S = sum_k signs[k] * E(x_k, y_k) over the pairs (00, 01, 10, 11).
double chsh_value(const CorrelationMatrix& corr, const SignConvention& conv);

// Evaluates all 8 conventions and classifies |S|_max against 2, 2*sqrt(2), 4.
ChshReport chsh_report(const CorrelationMatrix& corr);

// Vertex k of the local polytope, k in 0..15. Bit layout of k:
// bit0 = bit(a at x=0), bit1 = bit(a at x=1), bit2 = bit(b at y=0),
// bit3 = bit(b at y=1), with outcome = (-1)^bit.
BehaviorTable deterministic_strategy_behavior(int k);

inline constexpr int kNumDeterministicStrategies = 16;

struct LocalDecomposition {
  std::array<double, 16> weights{};  // over deterministic strategies
  double residual = 0.0;             // max-norm reconstruction error
};

struct InfeasibilityCertificate {
  SignConvention convention;
  double s_value;
};

struct LocalDecomposeResult {
  std::optional<LocalDecomposition> decomposition;
  std::optional<InfeasibilityCertificate> certificate;

  bool feasible() const { return decomposition.has_value(); }
};

// Convex-hull membership in the 16 deterministic strategies, decided by a
// small linear program minimizing the max-norm reconstruction error over the
// 16 probability cells. Requires nonsignalling_residual(behavior) <=
// tolerance, else throws SignallingInputError. The infeasibility certificate
// carries the convention with the largest |S|.
LocalDecomposeResult local_model_decompose(const BehaviorTable& behavior,
                                           double tolerance);

}  // namespace bellrank

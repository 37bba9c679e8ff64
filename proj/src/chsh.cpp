#include "bellrank/chsh.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bellrank/errors.hpp"
#include "bellrank/simplex.hpp"

namespace bellrank {

SignConvention SignConvention::from_signs(const std::array<int, 4>& signs) {
  int minus = 0;
  for (int s : signs) {
    if (s != 1 && s != -1) {
      throw InvalidConventionError("signs must be +1 or -1");
    }
    if (s == -1) ++minus;
  }
  if (minus != 1 && minus != 3) {
    throw InvalidConventionError(
        "a CHSH convention places exactly one or exactly three minus signs");
  }
  return SignConvention(signs);
}

SignConvention SignConvention::from_string(std::string_view s) {
  if (s.size() != 4) {
    throw InvalidConventionError("convention string must have 4 characters");
  }
  std::array<int, 4> signs{};
  for (int k = 0; k < 4; ++k) {
    const char c = s[static_cast<std::size_t>(k)];
    if (c == '+') {
      signs[k] = 1;
    } else if (c == '-') {
      signs[k] = -1;
    } else {
      throw InvalidConventionError("convention characters must be '+' or '-'");
    }
  }
  return from_signs(signs);
}

const std::array<SignConvention, 8>& SignConvention::all() {
  static const std::array<SignConvention, 8> conventions = [] {
    std::vector<SignConvention> found;
    for (int mask = 0; mask < 16; ++mask) {
      std::array<int, 4> signs{};
      int minus = 0;
      for (int k = 0; k < 4; ++k) {
        signs[k] = (mask >> k) & 1 ? -1 : 1;
        if (signs[k] == -1) ++minus;
      }
      if (minus == 1 || minus == 3) found.push_back(SignConvention(signs));
    }
    return std::array<SignConvention, 8>{found[0], found[1], found[2],
                                         found[3], found[4], found[5],
                                         found[6], found[7]};
  }();
  return conventions;
}

std::string SignConvention::str() const {
  std::string s;
  for (int k = 0; k < 4; ++k) s += signs_[k] == 1 ? '+' : '-';
  return s;
}

std::string to_string(BoundClass c) {
  switch (c) {
    case BoundClass::kLocal:
      return "LOCAL";
    case BoundClass::kQuantumCompatible:
      return "QUANTUM_COMPATIBLE";
    case BoundClass::kSupraQuantum:
      return "SUPRA_QUANTUM";
    case BoundClass::kInvalid:
      return "INVALID";
  }
  return "INVALID";
}

double chsh_value(const CorrelationMatrix& corr, const SignConvention& conv) {
  const auto& s = conv.signs();
  return s[0] * corr.e[0][0] + s[1] * corr.e[0][1] + s[2] * corr.e[1][0] +
         s[3] * corr.e[1][1];
}

ChshReport chsh_report(const CorrelationMatrix& corr) {
  ChshReport report;
  for (const auto& conv : SignConvention::all()) {
    const double s = chsh_value(corr, conv);
    report.s_by_convention[conv.str()] = s;
    report.s_max_abs = std::fmax(report.s_max_abs, std::fabs(s));
  }
  if (report.s_max_abs <= kLocalBound + kClassifyEps) {
    report.classification = BoundClass::kLocal;
  } else if (report.s_max_abs <= kTsirelsonBound + kClassifyEps) {
    report.classification = BoundClass::kQuantumCompatible;
  } else if (report.s_max_abs <= kAlgebraicBound + kClassifyEps) {
    report.classification = BoundClass::kSupraQuantum;
  } else {
    report.classification = BoundClass::kInvalid;
  }
  return report;
}

BehaviorTable deterministic_strategy_behavior(int k) {
  if (k < 0 || k >= kNumDeterministicStrategies) {
    throw IndexOutOfRangeError("strategy index " + std::to_string(k) +
                               " outside 0..15");
  }
  const int a_bit[2] = {(k >> 0) & 1, (k >> 1) & 1};
  const int b_bit[2] = {(k >> 2) & 1, (k >> 3) & 1};
  std::array<double, 16> cells{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      cells[cell_index(x, y, outcome_from_bit(a_bit[x]),
                       outcome_from_bit(b_bit[y]))] = 1.0;
    }
  }
  return BehaviorTable::from_cells(cells);
}

LocalDecomposeResult local_model_decompose(const BehaviorTable& behavior,
                                           double tolerance) {
  const double ns = nonsignalling_residual(behavior);
  if (ns > tolerance) {
    throw SignallingInputError(ns, tolerance);
  }

  // Vertex tables, one column per strategy.
  std::array<std::array<double, 16>, 16> vertex_cells{};
  for (int k = 0; k < kNumDeterministicStrategies; ++k) {
    vertex_cells[k] = deterministic_strategy_behavior(k).cells();
  }

  // Variables: w0..w15, t. Minimize t subject to
  //   sum_k w_k D_k(c) - t <= P(c)  and  sum_k w_k D_k(c) + t >= P(c)
  // for each cell c, plus sum_k w_k = 1.
  const std::size_t n_vars = 17;
  std::vector<double> objective(n_vars, 0.0);
  objective[16] = 1.0;

  std::vector<LpConstraint> constraints;
  constraints.reserve(33);
  for (std::size_t c = 0; c < 16; ++c) {
    LpConstraint upper;
    upper.coeffs.assign(n_vars, 0.0);
    for (int k = 0; k < 16; ++k) upper.coeffs[k] = vertex_cells[k][c];
    upper.coeffs[16] = -1.0;
    upper.relation = LpRelation::kLessEqual;
    upper.rhs = behavior.cells()[c];
    constraints.push_back(upper);

    LpConstraint lower = upper;
    lower.coeffs[16] = 1.0;
    lower.relation = LpRelation::kGreaterEqual;
    constraints.push_back(lower);
  }
  LpConstraint sum_to_one;
  sum_to_one.coeffs.assign(n_vars, 0.0);
  for (int k = 0; k < 16; ++k) sum_to_one.coeffs[k] = 1.0;
  sum_to_one.relation = LpRelation::kEqual;
  sum_to_one.rhs = 1.0;
  constraints.push_back(sum_to_one);

  const LpSolution sol = solve_lp(objective, constraints);
  if (sol.status != LpStatus::kOptimal) {
    throw std::logic_error(
        "local_model_decompose: feasibility LP did not reach an optimum");
  }

  // Residual recomputed from the returned weights so the reported value is
  // consistent with the decomposition actually handed back.
  double residual = 0.0;
  for (std::size_t c = 0; c < 16; ++c) {
    double reconstructed = 0.0;
    for (int k = 0; k < 16; ++k) reconstructed += sol.x[k] * vertex_cells[k][c];
    residual = std::fmax(residual, std::fabs(reconstructed - behavior.cells()[c]));
  }

  LocalDecomposeResult result;
  if (residual <= tolerance) {
    LocalDecomposition decomposition;
    for (int k = 0; k < 16; ++k) decomposition.weights[k] = sol.x[k];
    decomposition.residual = residual;
    result.decomposition = decomposition;
    return result;
  }

  const CorrelationMatrix corr = correlation_matrix(behavior);
  const SignConvention* worst = nullptr;
  double worst_abs = -1.0;
  double worst_value = 0.0;
  for (const auto& conv : SignConvention::all()) {
    const double s = chsh_value(corr, conv);
    if (std::fabs(s) > worst_abs) {
      worst_abs = std::fabs(s);
      worst_value = s;
      worst = &conv;
    }
  }
  result.certificate = InfeasibilityCertificate{*worst, worst_value};
  return result;
}

}  // namespace bellrank

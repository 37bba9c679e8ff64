#include "bellrank/behavior.hpp"

#include <cmath>
#include <stdexcept>

#include "bellrank/errors.hpp"

namespace bellrank {

namespace {

void check_setting(int x, const char* name) {
  if (x != 0 && x != 1) {
    throw std::invalid_argument(std::string(name) +
                                " setting index must be 0 or 1");
  }
}

void check_outcome(int a, const char* name) {
  if (a != 1 && a != -1) {
    throw std::invalid_argument(std::string(name) + " outcome must be +1 or -1");
  }
}

}  // namespace

int outcome_from_bit(int bit) {
  if (bit != 0 && bit != 1) {
    throw std::invalid_argument("outcome bit must be 0 or 1");
  }
  return bit == 0 ? 1 : -1;
}

int bit_from_outcome(int outcome) {
  check_outcome(outcome, "outcome");
  return outcome == 1 ? 0 : 1;
}

std::size_t cell_index(int x, int y, int a, int b) {
  check_setting(x, "x");
  check_setting(y, "y");
  return static_cast<std::size_t>(
      ((x * 2 + y) * 2 + bit_from_outcome(a)) * 2 + bit_from_outcome(b));
}

std::uint64_t OutcomeCountTable::count(int x, int y, int a, int b) const {
  return cells_[cell_index(x, y, a, b)];
}

void OutcomeCountTable::set(int x, int y, int a, int b, std::uint64_t n) {
  cells_[cell_index(x, y, a, b)] = n;
}

void OutcomeCountTable::add(int x, int y, int a, int b, std::uint64_t n) {
  cells_[cell_index(x, y, a, b)] += n;
}

std::uint64_t OutcomeCountTable::block_total(int x, int y) const {
  const std::size_t base = static_cast<std::size_t>((x * 2 + y) * 4);
  return cells_[base] + cells_[base + 1] + cells_[base + 2] + cells_[base + 3];
}

std::uint64_t OutcomeCountTable::total() const {
  std::uint64_t sum = 0;
  for (auto c : cells_) sum += c;
  return sum;
}

BehaviorTable BehaviorTable::from_cells(const std::array<double, 16>& cells) {
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      double block_sum = 0.0;
      for (int cell = 0; cell < 4; ++cell) {
        const double p = cells[static_cast<std::size_t>((x * 2 + y) * 4 + cell)];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw InvalidBehaviorError("negative or non-finite probability in block (" +
                                     std::to_string(x) + "," + std::to_string(y) + ")");
        }
        block_sum += p;
      }
      if (std::fabs(block_sum - 1.0) > kProbTolerance) {
        throw InvalidBehaviorError(
            "block (" + std::to_string(x) + "," + std::to_string(y) +
            ") sums to " + std::to_string(block_sum) + ", expected 1");
      }
    }
  }
  return BehaviorTable(cells);
}

double BehaviorTable::prob(int x, int y, int a, int b) const {
  return cells_[cell_index(x, y, a, b)];
}

double BehaviorTable::marginal_a(int x, int y, int a) const {
  return prob(x, y, a, 1) + prob(x, y, a, -1);
}

double BehaviorTable::marginal_b(int x, int y, int b) const {
  return prob(x, y, 1, b) + prob(x, y, -1, b);
}

CorrelationMatrix CorrelationMatrix::from_values(double e00, double e01,
                                                 double e10, double e11) {
  CorrelationMatrix m;
  m.e[0][0] = e00;
  m.e[0][1] = e01;
  m.e[1][0] = e10;
  m.e[1][1] = e11;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (std::fabs(m.e[x][y]) > 1.0 + kProbTolerance) {
        throw std::invalid_argument("correlator magnitude exceeds 1");
      }
    }
  }
  return m;
}

void HiddenVariableModel::validate() const {
  if (lambda_weights.empty()) {
    throw InvalidModelError("model has no lambda labels");
  }
  double weight_sum = 0.0;
  for (const auto& [label, w] : lambda_weights) {
    if (!(w >= 0.0)) {
      throw InvalidModelError("negative weight for lambda '" + label + "'");
    }
    if (responses.find(label) == responses.end()) {
      throw InvalidModelError("lambda '" + label + "' has no response");
    }
    weight_sum += w;
  }
  if (std::fabs(weight_sum - 1.0) > kProbTolerance) {
    throw InvalidModelError("lambda weights sum to " +
                            std::to_string(weight_sum) + ", expected 1");
  }
  for (const auto& [label, response] : responses) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        double s = 0.0;
        for (double p : response.joint[x][y]) {
          if (!(p >= 0.0)) {
            throw InvalidModelError("negative response probability for '" +
                                    label + "'");
          }
          s += p;
        }
        if (std::fabs(s - 1.0) > kProbTolerance) {
          throw InvalidModelError("response of '" + label + "' at (" +
                                  std::to_string(x) + "," + std::to_string(y) +
                                  ") sums to " + std::to_string(s));
        }
      }
    }
  }
  if (setting_dependent_weights) {
    for (int block = 0; block < 4; ++block) {
      const auto& weights = (*setting_dependent_weights)[block];
      double s = 0.0;
      for (const auto& [label, w] : weights) {
        if (lambda_weights.find(label) == lambda_weights.end()) {
          throw InvalidModelError("setting-dependent weight for unknown lambda '" +
                                  label + "'");
        }
        if (!(w >= 0.0)) {
          throw InvalidModelError("negative setting-dependent weight");
        }
        s += w;
      }
      if (std::fabs(s - 1.0) > kProbTolerance) {
        throw InvalidModelError("setting-dependent weights at block " +
                                std::to_string(block) + " sum to " +
                                std::to_string(s));
      }
    }
  }
}

BehaviorTable normalize_counts(const OutcomeCountTable& counts) {
  std::array<double, 16> cells{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const std::uint64_t total = counts.block_total(x, y);
      if (total == 0) throw EmptyBlockError(x, y);
      const std::size_t base = static_cast<std::size_t>((x * 2 + y) * 4);
      for (int cell = 0; cell < 4; ++cell) {
        cells[base + cell] = static_cast<double>(counts.cells()[base + cell]) /
                             static_cast<double>(total);
      }
    }
  }
  return BehaviorTable::from_cells(cells);
}

double correlator(const BehaviorTable& behavior, int x, int y) {
  double e = 0.0;
  for (int a : {1, -1}) {
    for (int b : {1, -1}) {
      e += static_cast<double>(a * b) * behavior.prob(x, y, a, b);
    }
  }
  return e;
}

CorrelationMatrix correlation_matrix(const BehaviorTable& behavior) {
  CorrelationMatrix m;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      m.e[x][y] = correlator(behavior, x, y);
    }
  }
  return m;
}

double nonsignalling_residual(const BehaviorTable& behavior) {
  double residual = 0.0;
  for (int a : {1, -1}) {
    for (int x = 0; x < 2; ++x) {
      residual = std::fmax(residual,
                           std::fabs(behavior.marginal_a(x, 0, a) -
                                     behavior.marginal_a(x, 1, a)));
    }
  }
  for (int b : {1, -1}) {
    for (int y = 0; y < 2; ++y) {
      residual = std::fmax(residual,
                           std::fabs(behavior.marginal_b(0, y, b) -
                                     behavior.marginal_b(1, y, b)));
    }
  }
  return residual;
}

double factorization_residual(const HiddenVariableModel& model) {
  model.validate();
  double residual = 0.0;
  for (const auto& [label, response] : model.responses) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const auto& joint = response.joint[x][y];
        for (int abit = 0; abit < 2; ++abit) {
          const double pa = joint[abit * 2] + joint[abit * 2 + 1];
          for (int bbit = 0; bbit < 2; ++bbit) {
            const double pb = joint[bbit] + joint[2 + bbit];
            const double cell = joint[abit * 2 + bbit];
            residual = std::fmax(residual, std::fabs(cell - pa * pb));
          }
        }
      }
    }
  }
  return residual;
}

double measurement_independence_residual(const HiddenVariableModel& model) {
  model.validate();
  if (!model.setting_dependent_weights) {
    throw MissingSettingWeightsError();
  }
  const auto& per_block = *model.setting_dependent_weights;
  double residual = 0.0;
  for (const auto& [label, base_weight] : model.lambda_weights) {
    (void)base_weight;
    double avg = 0.0;
    for (int block = 0; block < 4; ++block) {
      const auto it = per_block[block].find(label);
      if (it != per_block[block].end()) avg += it->second;
    }
    avg /= 4.0;  // uniform distribution over the four setting pairs
    for (int block = 0; block < 4; ++block) {
      const auto it = per_block[block].find(label);
      const double w = it == per_block[block].end() ? 0.0 : it->second;
      residual = std::fmax(residual, std::fabs(w - avg));
    }
  }
  return residual;
}

}  // namespace bellrank

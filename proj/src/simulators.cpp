#include "bellrank/simulators.hpp"

#include <cmath>
#include <numbers>

#include "bellrank/rng.hpp"
#include "bellrank/sampling.hpp"
#include "bellrank/chsh.hpp"

namespace bellrank {

namespace {

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

}  // namespace

SingletAngles SingletAngles::from_radians(double a0, double a1, double b0,
                                          double b1) {
  for (double v : {a0, a1, b0, b1}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("angles must be finite");
    }
  }
  SingletAngles angles;
  angles.a0 = wrap_angle(a0);
  angles.a1 = wrap_angle(a1);
  angles.b0 = wrap_angle(b0);
  angles.b1 = wrap_angle(b1);
  return angles;
}

BehaviorTable pr_box_behavior() {
  std::array<double, 16> cells{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int abit = 0; abit < 2; ++abit) {
        for (int bbit = 0; bbit < 2; ++bbit) {
          if ((abit ^ bbit) == (x & y)) {
            cells[cell_index(x, y, outcome_from_bit(abit),
                             outcome_from_bit(bbit))] = 0.5;
          }
        }
      }
    }
  }
  return BehaviorTable::from_cells(cells);
}

BehaviorTable singlet_behavior(const SingletAngles& angles) {
  std::array<double, 16> cells{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double e = -std::cos(angles.alice(x) - angles.bob(y));
      for (int a : {1, -1}) {
        for (int b : {1, -1}) {
          cells[cell_index(x, y, a, b)] = (1.0 + a * b * e) / 4.0;
        }
      }
    }
  }
  return BehaviorTable::from_cells(cells);
}

BehaviorTable lhv_behavior(const std::array<double, 16>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("strategy weights must be nonnegative");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kProbTolerance) {
    throw std::invalid_argument("strategy weights must sum to 1");
  }
  std::array<double, 16> cells{};
  for (int k = 0; k < kNumDeterministicStrategies; ++k) {
    if (weights[k] == 0.0) continue;
    const std::array<double, 16> vertex = deterministic_strategy_behavior(k).cells();
    for (std::size_t c = 0; c < 16; ++c) cells[c] += weights[k] * vertex[c];
  }
  return BehaviorTable::from_cells(cells);
}

BehaviorTable mix_with_noise(const BehaviorTable& behavior, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw VisibilityOutOfRangeError(visibility);
  }
  std::array<double, 16> cells{};
  for (std::size_t c = 0; c < 16; ++c) {
    cells[c] = visibility * behavior.cells()[c] + (1.0 - visibility) * 0.25;
  }
  return BehaviorTable::from_cells(cells);
}

OutcomeCountTable sample_trials(const BehaviorTable& behavior,
                                std::uint64_t n_per_block, std::uint64_t seed) {
  if (n_per_block < 1) {
    throw std::invalid_argument("n_per_block must be at least 1");
  }
  OutcomeCountTable counts;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      // Independent stream per block so adding blocks never perturbs others.
      Xoshiro256pp rng(stream_seed(seed, static_cast<std::uint64_t>(x * 2 + y)));
      std::array<double, 4> probs{};
      for (int cell = 0; cell < 4; ++cell) {
        probs[cell] = behavior.cells()[static_cast<std::size_t>((x * 2 + y) * 4 + cell)];
      }
      const auto draws = multinomial_draw(n_per_block, probs, rng);
      for (int cell = 0; cell < 4; ++cell) {
        counts.set(x, y, outcome_from_bit(cell >> 1), outcome_from_bit(cell & 1),
                   draws[static_cast<std::size_t>(cell)]);
      }
    }
  }
  return counts;
}

std::string to_string(Role role) {
  return role == Role::kAlice ? "alice" : "bob";
}

std::string to_string(SessionPolicy policy) {
  switch (policy) {
    case SessionPolicy::kPerTrial:
      return "PER_TRIAL";
    case SessionPolicy::kPerBlock:
      return "PER_BLOCK";
    case SessionPolicy::kNever:
      return "NEVER";
  }
  return "NEVER";
}

namespace {

std::string session_token(Role role, SessionPolicy policy, std::uint64_t trial,
                          int x, int y) {
  const std::string who = to_string(role);
  switch (policy) {
    case SessionPolicy::kPerTrial:
      return who + "-trial-" + std::to_string(trial);
    case SessionPolicy::kPerBlock:
      return who + "-block-" + std::to_string(x) + std::to_string(y);
    case SessionPolicy::kNever:
      return who + "-session-0";
  }
  return who + "-session-0";
}

}  // namespace

ProtocolResult run_protocol(const Responder& alice, const Responder& bob,
                            std::uint64_t n_trials, std::uint64_t seed,
                            SessionPolicy policy) {
  if (!alice || !bob) {
    throw std::invalid_argument("both responders must be callable");
  }
  ProtocolResult result;
  result.log.reserve(n_trials);
  Xoshiro256pp setting_rng(stream_seed(seed, 0xb311));

  for (std::uint64_t trial = 0; trial < n_trials; ++trial) {
    const std::uint64_t bits = setting_rng.next();
    const int x = static_cast<int>(bits & 1);
    const int y = static_cast<int>((bits >> 1) & 1);
    const std::string alice_token =
        session_token(Role::kAlice, policy, trial, x, y);
    const std::string bob_token = session_token(Role::kBob, policy, trial, x, y);

    auto query = [&](const Responder& responder, Role role, int setting,
                     const std::string& token) {
      int outcome = 0;
      try {
        outcome = responder(role, setting, trial, token);
      } catch (const std::exception& e) {
        throw ProtocolFailure(role, trial, e.what(), std::move(result));
      }
      if (outcome != 1 && outcome != -1) {
        throw ProtocolFailure(role, trial,
                              "returned outcome " + std::to_string(outcome) +
                                  ", expected +1 or -1",
                              std::move(result));
      }
      return outcome;
    };

    const int a = query(alice, Role::kAlice, x, alice_token);
    const int b = query(bob, Role::kBob, y, bob_token);

    result.counts.add(x, y, a, b);
    result.log.push_back({trial, x, y, a, b, alice_token, bob_token});
  }
  return result;
}

}  // namespace bellrank

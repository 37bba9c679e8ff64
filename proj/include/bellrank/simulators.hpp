#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bellrank/behavior.hpp"
#include "bellrank/errors.hpp"

namespace bellrank {

// Measurement angles in radians, stored modulo 2*pi.
struct SingletAngles {
  double a0 = 0.0;
  double a1 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;

  static SingletAngles from_radians(double a0, double a1, double b0, double b1);
  double alice(int x) const { return x == 0 ? a0 : a1; }
  double bob(int y) const { return y == 0 ? b0 : b1; }
};

// P(a,b|x,y) = 1/2 when bit(a) XOR bit(b) = x*y, else 0.
BehaviorTable pr_box_behavior();

// Correlators E(x,y) = -cos(theta_a(x) - theta_b(y)) with uniform marginals:
// P(a,b|x,y) = (1 + a*b*E(x,y)) / 4.
BehaviorTable singlet_behavior(const SingletAngles& angles);

// Convex mixture of the 16 deterministic strategies.
BehaviorTable lhv_behavior(const std::array<double, 16>& weights);

// v*behavior + (1-v)*uniform. Throws VisibilityOutOfRangeError.
BehaviorTable mix_with_noise(const BehaviorTable& behavior, double visibility);

// Multinomial draw of n_per_block trials per setting pair; deterministic
// given the seed.
OutcomeCountTable sample_trials(const BehaviorTable& behavior,
                                std::uint64_t n_per_block, std::uint64_t seed);

// ---- randomized-settings trial harness ------------------------------------

enum class Role { kAlice, kBob };

std::string to_string(Role role);

// A responder sees only its own setting. The call signature has no channel
// for the remote party's setting, so isolation is structural, not a protocol
// promise. Returns +1 or -1.
using Responder = std::function<int(Role role, int setting, std::uint64_t trial,
                                    const std::string& session_token)>;

enum class SessionPolicy { kPerTrial, kPerBlock, kNever };

std::string to_string(SessionPolicy policy);

struct TrialLogEntry {
  std::uint64_t trial;
  int x;
  int y;
  int a;
  int b;
  std::string alice_session;
  std::string bob_session;
};

struct ProtocolResult {
  OutcomeCountTable counts;
  std::vector<TrialLogEntry> log;
};

// Thrown when a responder fails mid-run; carries whatever was tallied before
// the abort so partial data stays inspectable without being mistaken for a
// completed run.
class ProtocolFailure : public ResponderFailureError {
 public:
  ProtocolFailure(Role role, std::uint64_t trial, const std::string& reason,
                  ProtocolResult partial)
      : ResponderFailureError(to_string(role), trial, reason),
        partial_(std::move(partial)) {}
  const ProtocolResult& partial() const { return partial_; }

 private:
  ProtocolResult partial_;
};

// Draws (x,y) uniformly from a seeded generator the responders cannot
// observe, queries each responder with only its own setting, and tallies
// outcomes. The log records per-trial settings, outcomes and session tokens
// so measurement independence is auditable after the fact. A responder that
// throws or returns an invalid outcome aborts the run via ProtocolFailure.
ProtocolResult run_protocol(const Responder& alice, const Responder& bob,
                            std::uint64_t n_trials, std::uint64_t seed,
                            SessionPolicy policy);

}  // namespace bellrank

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bellrank {

// Base for all typed failures. `code()` is a stable machine-readable
// identifier used by the CLI's error objects and by tests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// ---- behavior-core -------------------------------------------------------

class EmptyBlockError : public Error {
 public:
  EmptyBlockError(int x, int y)
      : Error("EmptyBlock", "setting pair (" + std::to_string(x) + "," +
                                std::to_string(y) + ") has no observations"),
        x_(x),
        y_(y) {}
  int x() const { return x_; }
  int y() const { return y_; }

 private:
  int x_, y_;
};

class InvalidBehaviorError : public Error {
 public:
  explicit InvalidBehaviorError(const std::string& message)
      : Error("InvalidBehavior", message) {}
};

class InvalidModelError : public Error {
 public:
  explicit InvalidModelError(const std::string& message)
      : Error("InvalidModel", message) {}
};

class MissingSettingWeightsError : public Error {
 public:
  MissingSettingWeightsError()
      : Error("MissingSettingWeights",
              "model carries no setting-dependent lambda weights; "
              "setting independence holds by construction") {}
};

// ---- chsh ----------------------------------------------------------------

class IndexOutOfRangeError : public Error {
 public:
  explicit IndexOutOfRangeError(const std::string& message)
      : Error("IndexOutOfRange", message) {}
};

class InvalidConventionError : public Error {
 public:
  explicit InvalidConventionError(const std::string& message)
      : Error("InvalidConvention", message) {}
};

class SignallingInputError : public Error {
 public:
  explicit SignallingInputError(double residual, double tolerance)
      : Error("SignallingInput",
              "behavior signals (residual " + std::to_string(residual) +
                  " > tolerance " + std::to_string(tolerance) +
                  "); local decomposition is ill-posed") {}
};

// ---- inference -----------------------------------------------------------

class DegenerateResamplesError : public Error {
 public:
  explicit DegenerateResamplesError(const std::string& message)
      : Error("DegenerateResamples", message) {}
};

class NoEligibleParticipantsError : public Error {
 public:
  NoEligibleParticipantsError()
      : Error("NoEligibleParticipants",
              "no participant has at least one trial in every setting block") {}
};

class ZeroVarianceError : public Error {
 public:
  ZeroVarianceError()
      : Error("ZeroVariance", "sample standard deviation is zero") {}
};

class TooFewSamplesError : public Error {
 public:
  explicit TooFewSamplesError(const std::string& message)
      : Error("TooFewSamples", message) {}
};

// ---- simulators ----------------------------------------------------------

class VisibilityOutOfRangeError : public Error {
 public:
  explicit VisibilityOutOfRangeError(double v)
      : Error("VisibilityOutOfRange",
              "visibility " + std::to_string(v) + " outside [0,1]") {}
};

class ResponderFailureError : public Error {
 public:
  ResponderFailureError(const std::string& role, std::uint64_t trial,
                        const std::string& reason)
      : Error("ResponderFailure",
              role + " responder failed on trial " + std::to_string(trial) +
                  ": " + reason),
        role_(role),
        trial_(trial) {}
  const std::string& role() const { return role_; }
  std::uint64_t trial() const { return trial_; }

 private:
  std::string role_;
  std::uint64_t trial_;
};

// ---- rankfit -------------------------------------------------------------

class ParamOutOfDomainError : public Error {
 public:
  explicit ParamOutOfDomainError(const std::string& message)
      : Error("ParamOutOfDomain", message) {}
};

class RankOutOfSupportError : public Error {
 public:
  explicit RankOutOfSupportError(const std::string& message)
      : Error("RankOutOfSupport", message) {}
};

class OptimizationFailedError : public Error {
 public:
  explicit OptimizationFailedError(const std::string& message)
      : Error("OptimizationFailed", message) {}
};

class NonPositiveLevelError : public Error {
 public:
  explicit NonPositiveLevelError(const std::string& message)
      : Error("NonPositiveLevel", message) {}
};

class TooFewLevelsError : public Error {
 public:
  explicit TooFewLevelsError(const std::string& message)
      : Error("TooFewLevels", message) {}
};

class InvalidRankTableError : public Error {
 public:
  explicit InvalidRankTableError(const std::string& message)
      : Error("InvalidRankTable", message) {}
};

// ---- corpus --------------------------------------------------------------

class DegenerateSplitError : public Error {
 public:
  explicit DegenerateSplitError(const std::string& message)
      : Error("DegenerateSplit", message) {}
};

// ---- io / cli ------------------------------------------------------------

class SchemaViolationError : public Error {
 public:
  explicit SchemaViolationError(const std::string& message)
      : Error("SchemaViolation", message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error("Usage", message) {}
};

}  // namespace bellrank

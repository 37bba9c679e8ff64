#include "bellrank/report.hpp"

#include <chrono>
#include <fstream>
#include <cstdio>
#include <ctime>

#include "bellrank/version.hpp"

namespace bellrank {

RunManifest RunManifest::make(const std::string& subcommand) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.artifact_version = kArtifactVersion;
  manifest.timestamp = iso8601_utc_now();
  return manifest;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buffer;
}

nlohmann::json to_json(const RunManifest& manifest) {
  return {
      {"subcommand", manifest.subcommand},
      {"inputs", manifest.inputs},
      {"config", manifest.config},
      {"seeds", manifest.seeds},
      {"artifact_version", manifest.artifact_version},
      {"timestamp", manifest.timestamp},
  };
}

nlohmann::json behavior_to_json(const BehaviorTable& behavior) {
  nlohmann::json blocks = nlohmann::json::object();
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      nlohmann::json block = nlohmann::json::object();
      for (int a : {1, -1}) {
        for (int b : {1, -1}) {
          const std::string key = std::string(a == 1 ? "+" : "-") +
                                  std::string(b == 1 ? "+" : "-");
          block[key] = behavior.prob(x, y, a, b);
        }
      }
      blocks[std::to_string(x) + std::to_string(y)] = std::move(block);
    }
  }
  return blocks;
}

nlohmann::json correlation_to_json(const CorrelationMatrix& matrix) {
  return {
      {"e00", matrix.e[0][0]},
      {"e01", matrix.e[0][1]},
      {"e10", matrix.e[1][0]},
      {"e11", matrix.e[1][1]},
  };
}

nlohmann::json chsh_report_to_json(const ChshReport& report) {
  return {
      {"s_by_convention", report.s_by_convention},
      {"s_max_abs", report.s_max_abs},
      {"classification", to_string(report.classification)},
      {"bounds",
       {{"local", kLocalBound},
        {"tsirelson", kTsirelsonBound},
        {"algebraic", kAlgebraicBound}}},
  };
}

nlohmann::json interval_to_json(const IntervalEstimate& estimate) {
  return {
      {"point", estimate.point},   {"lower", estimate.lower},
      {"upper", estimate.upper},   {"level", estimate.level},
      {"method", to_string(estimate.method)},
  };
}

nlohmann::json t_test_to_json(const TTestResult& result) {
  return {
      {"t", result.t},
      {"p_two_sided", result.p_two_sided},
      {"df", result.df},
  };
}

nlohmann::json permutation_to_json(const PermutationTestResult& result) {
  return {
      {"observed_s", result.observed_s},
      {"p", result.p},
      {"n_permutations", result.n_permutations},
  };
}

nlohmann::json decomposition_to_json(const LocalDecomposeResult& result) {
  nlohmann::json out;
  out["feasible"] = result.feasible();
  if (result.decomposition) {
    nlohmann::json weights = nlohmann::json::object();
    for (int k = 0; k < kNumDeterministicStrategies; ++k) {
      if (result.decomposition->weights[k] > 0.0) {
        weights[std::to_string(k)] = result.decomposition->weights[k];
      }
    }
    out["weights"] = std::move(weights);
    out["residual"] = result.decomposition->residual;
  }
  if (result.certificate) {
    out["certificate"] = {
        {"convention", result.certificate->convention.str()},
        {"s_value", result.certificate->s_value},
    };
  }
  return out;
}

nlohmann::json fit_result_to_json(const FitResult& fit) {
  return {
      {"family", family_name(fit.spec.family)},
      {"params", fit.spec.params},
      {"support", fit.spec.support},
      {"loglik", fit.loglik},
      {"aic", fit.aic},
      {"bic", fit.bic},
      {"k", fit.k},
      {"converged", fit.converged},
      {"trace",
       {{"n_starts", fit.trace.n_starts},
        {"n_evaluations", fit.trace.n_evaluations},
        {"best_start", fit.trace.best_start},
        {"best_pair_gap", fit.trace.best_pair_gap}}},
  };
}

nlohmann::json regime_report_to_json(const RegimeReport& report) {
  nlohmann::json out = {
      {"small_i_max_rel_err", report.small_i_max_rel_err},
      {"tail_max_rel_err", report.tail_max_rel_err},
      {"i_over_b_max", report.i_over_b_max},
      {"a_minus_1", report.a_minus_1},
      {"zipf_window_threshold", report.zipf_window_threshold},
  };
  if (report.zipf_window) {
    out["zipf_window"] = {{"lo", report.zipf_window->lo},
                          {"hi", report.zipf_window->hi}};
  } else {
    out["zipf_window"] = nullptr;
  }
  return out;
}

nlohmann::json protocol_log_entry_to_json(const TrialLogEntry& entry) {
  return {
      {"trial", entry.trial},
      {"x", entry.x},
      {"y", entry.y},
      {"a", entry.a},
      {"b", entry.b},
      {"alice_session", entry.alice_session},
      {"bob_session", entry.bob_session},
  };
}

void write_protocol_log(const std::string& path,
                        const std::vector<TrialLogEntry>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write protocol log '" + path + "'");
  }
  for (const auto& entry : log) {
    out << protocol_log_entry_to_json(entry).dump() << '\n';
  }
}

nlohmann::json make_report(const RunManifest& manifest,
                           const nlohmann::json& analysis) {
  return {
      {"schema_version", kReportSchemaVersion},
      {"manifest", to_json(manifest)},
      {"analysis", analysis},
  };
}

std::string render_json(const nlohmann::json& value) {
  return value.dump(2) + "\n";
}

}  // namespace bellrank

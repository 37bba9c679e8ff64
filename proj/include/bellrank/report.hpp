#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bellrank/behavior.hpp"
#include "bellrank/chsh.hpp"
#include "bellrank/inference.hpp"
#include "bellrank/rankfit.hpp"
#include "bellrank/simulators.hpp"

namespace bellrank {

// Reproducibility record embedded in every report. Two runs whose manifests
// agree (timestamp aside) must produce byte-identical analysis sections;
// keys serialize sorted and doubles shortest-round-trip, so the JSON text is
// a function of the values alone.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> inputs;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  std::string artifact_version;
  std::string timestamp;  // ISO 8601 UTC

  static RunManifest make(const std::string& subcommand);
};

nlohmann::json to_json(const RunManifest& manifest);

nlohmann::json behavior_to_json(const BehaviorTable& behavior);
nlohmann::json correlation_to_json(const CorrelationMatrix& matrix);
nlohmann::json chsh_report_to_json(const ChshReport& report);
nlohmann::json interval_to_json(const IntervalEstimate& estimate);
nlohmann::json t_test_to_json(const TTestResult& result);
nlohmann::json permutation_to_json(const PermutationTestResult& result);
nlohmann::json decomposition_to_json(const LocalDecomposeResult& result);
nlohmann::json fit_result_to_json(const FitResult& fit);
nlohmann::json regime_report_to_json(const RegimeReport& report);
nlohmann::json protocol_log_entry_to_json(const TrialLogEntry& entry);

// JSON-lines protocol log, one record per trial:
//   {"trial":..,"x":..,"y":..,"a":..,"b":..,"alice_session":..,"bob_session":..}
void write_protocol_log(const std::string& path,
                        const std::vector<TrialLogEntry>& log);

// Full report envelope: schema_version + manifest + analysis.
nlohmann::json make_report(const RunManifest& manifest,
                           const nlohmann::json& analysis);

// Rendered with 2-space indentation and a trailing newline.
std::string render_json(const nlohmann::json& value);

std::string iso8601_utc_now();

}  // namespace bellrank

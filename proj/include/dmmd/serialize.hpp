#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmmd/pipeline.hpp"

namespace dmmd {

inline constexpr int kSchemaVersion = 1;

Strategy parse_strategy(const std::string& s);
Classifier parse_classifier(const std::string& s);
Metric parse_metric(const std::string& s);
WeightMode parse_weight_mode(const std::string& s);
AblationVariant parse_variant(const std::string& s);

nlohmann::json config_to_json(const AdaptConfig& cfg);

/// Applies the keys present in j on top of cfg. Unknown keys throw
/// InvalidArgument so typos in manifests do not pass silently.
void apply_config_overrides(AdaptConfig& cfg, const nlohmann::json& j);

struct RunInputs {
  std::string source;
  std::string target;
  std::optional<std::string> truth;
};

/// Result document. The "timing" member is the only run-dependent field
/// and is omitted when include_timing is false.
nlohmann::json result_to_json(const AdaptResult& r, const RunInputs& inputs,
                              bool include_timing = true);

nlohmann::json suite_to_json(const std::vector<SuiteRow>& rows, const RunInputs& inputs,
                             std::optional<double> no_adaptation_accuracy);

struct ManifestTask {
  std::string name;
  std::filesystem::path source;
  std::filesystem::path target;
  std::optional<std::filesystem::path> truth;
  nlohmann::json overrides = nlohmann::json::object();
};

struct RunManifest {
  nlohmann::json defaults = nlohmann::json::object();
  std::optional<std::string> preset;
  bool grid_search = false;
  std::vector<ManifestTask> tasks;
};

/// Relative paths are resolved against the manifest's directory. Throws
/// InvalidArgument on duplicate task names or missing required keys.
RunManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunManifest load_manifest(const std::filesystem::path& path);

/// Writes j.dump(2) plus a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dmmd

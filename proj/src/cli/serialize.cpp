#include "dmmd/serialize.hpp"

#include <fstream>
#include <set>

#include "dmmd/errors.hpp"

namespace dmmd {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json weights_json(const std::vector<std::pair<int, double>>& weights) {
  json arr = json::array();
  for (const auto& [c, w] : weights) arr.push_back({{"class", c}, {"weight", w}});
  return arr;
}

json inputs_json(const RunInputs& in) {
  return {{"source", in.source},
          {"target", in.target},
          {"truth", in.truth ? json(*in.truth) : json(nullptr)}};
}

}  // namespace

Strategy parse_strategy(const std::string& s) {
  if (s == "baseline" || s == "mmd") return Strategy::kBaseline;
  if (s == "s1") return Strategy::kStrategy1;
  if (s == "s2") return Strategy::kStrategy2;
  if (s == "ablation") return Strategy::kAblation;
  throw InvalidArgument("unknown strategy '" + s + "' (baseline, s1, s2, ablation)");
}

Classifier parse_classifier(const std::string& s) {
  if (s == "glp") return Classifier::kGlp;
  if (s == "one_nn" || s == "knn" || s == "1nn") return Classifier::kOneNn;
  throw InvalidArgument("unknown classifier '" + s + "' (glp, one_nn)");
}

Metric parse_metric(const std::string& s) {
  if (s == "cosine") return Metric::kCosine;
  if (s == "euclidean-gaussian") return Metric::kEuclideanGaussian;
  throw InvalidArgument("unknown metric '" + s + "' (cosine, euclidean-gaussian)");
}

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "product") return WeightMode::kProduct;
  if (s == "sum") return WeightMode::kSum;
  throw InvalidArgument("unknown weight mode '" + s + "' (product, sum)");
}

AblationVariant parse_variant(const std::string& s) {
  if (s == "Dtra") return AblationVariant::kDtra;
  if (s == "Dter") return AblationVariant::kDter;
  if (s == "Both") return AblationVariant::kBoth;
  throw InvalidArgument("unknown ablation variant '" + s + "' (Dtra, Dter, Both)");
}

json config_to_json(const AdaptConfig& cfg) {
  return {{"strategy", to_string(cfg.strategy)},
          {"variant", to_string(cfg.variant)},
          {"gamma1", cfg.gamma1},
          {"gamma2", cfg.gamma2},
          {"k", cfg.k},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"lambda", cfg.lambda},
          {"T", cfg.t_iters},
          {"p", cfg.p_neighbors},
          {"normalize", to_string(cfg.normalize)},
          {"classifier", to_string(cfg.classifier)},
          {"metric", to_string(cfg.metric)},
          {"ridge", cfg.ridge},
          {"weight_mode", to_string(cfg.weight_mode)},
          {"seed", cfg.seed}};
}

void apply_config_overrides(AdaptConfig& cfg, const json& j) {
  if (!j.is_object()) throw InvalidArgument("config overrides must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "preset") apply_preset(cfg, parse_preset(value.get<std::string>()));
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "preset") continue;
      else if (key == "strategy") cfg.strategy = parse_strategy(value.get<std::string>());
      else if (key == "variant") cfg.variant = parse_variant(value.get<std::string>());
      else if (key == "gamma1") cfg.gamma1 = value.get<double>();
      else if (key == "gamma2") cfg.gamma2 = value.get<double>();
      else if (key == "k") cfg.k = value.get<Index>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "beta") cfg.beta = value.get<double>();
      else if (key == "lambda") cfg.lambda = value.get<double>();
      else if (key == "T") cfg.t_iters = value.get<int>();
      else if (key == "p") cfg.p_neighbors = value.get<Index>();
      else if (key == "normalize") cfg.normalize = parse_normalize_mode(value.get<std::string>());
      else if (key == "classifier") cfg.classifier = parse_classifier(value.get<std::string>());
      else if (key == "metric") cfg.metric = parse_metric(value.get<std::string>());
      else if (key == "ridge") cfg.ridge = value.get<double>();
      else if (key == "weight_mode") cfg.weight_mode = parse_weight_mode(value.get<std::string>());
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw InvalidArgument("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config value: ") + e.what());
  }
}

json result_to_json(const AdaptResult& r, const RunInputs& inputs, bool include_timing) {
  json iterations = json::array();
  for (const auto& rec : r.per_iteration) {
    iterations.push_back({{"iteration", rec.iteration},
                          {"accuracy", optional_number(rec.accuracy)},
                          {"objective", rec.objective},
                          {"classes_skipped", rec.classes_skipped},
                          {"implicit_weights", weights_json(rec.implicit_weights)},
                          {"constraint_residual", rec.constraint_residual},
                          {"eig_residual", rec.eig_residual},
                          {"ridge_used", rec.ridge_used},
                          {"isolated_targets", rec.isolated_targets},
                          {"warnings", rec.warnings}});
  }
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "adapt_result"},
            {"inputs", inputs_json(inputs)},
            {"config", config_to_json(r.config)},
            {"effective", {{"k", r.k_used}, {"p", r.p_used}}},
            {"notes", r.notes},
            {"initial_accuracy", optional_number(r.initial_accuracy)},
            {"final_accuracy", optional_number(r.final_accuracy)},
            {"iterations", iterations},
            {"final_labels", r.final_labels}};
  if (include_timing) j["timing"] = {{"elapsed_ms", r.elapsed_ms}};
  return j;
}

json suite_to_json(const std::vector<SuiteRow>& rows, const RunInputs& inputs,
                   std::optional<double> no_adaptation_accuracy) {
  json arr = json::array();
  for (const auto& row : rows) {
    arr.push_back({{"name", row.name},
                   {"classifier", to_string(row.config.classifier)},
                   {"config", config_to_json(row.config)},
                   {"final_accuracy", optional_number(row.result.final_accuracy)},
                   {"iteration_accuracy",
                    [&] {
                      json acc = json::array();
                      for (const auto& rec : row.result.per_iteration) {
                        acc.push_back(optional_number(rec.accuracy));
                      }
                      return acc;
                    }()},
                   {"final_labels", row.result.final_labels}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "ablation_table"},
          {"inputs", inputs_json(inputs)},
          {"no_adaptation_accuracy", optional_number(no_adaptation_accuracy)},
          {"rows", arr}};
}

RunManifest parse_manifest(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array()) {
    throw InvalidArgument("manifest: expected an object with a 'tasks' array");
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  RunManifest m;
  try {
    if (j.contains("defaults")) m.defaults = j["defaults"];
    if (j.contains("preset")) m.preset = j["preset"].get<std::string>();
    if (j.contains("grid_search")) m.grid_search = j["grid_search"].get<bool>();
    std::set<std::string> names;
    for (const auto& t : j["tasks"]) {
      ManifestTask task;
      task.name = t.at("name").get<std::string>();
      if (task.name.empty() || task.name.find('/') != std::string::npos) {
        throw InvalidArgument("manifest: task name '" + task.name + "' is not a valid file stem");
      }
      if (!names.insert(task.name).second) {
        throw InvalidArgument("manifest: duplicate task name '" + task.name + "'");
      }
      task.source = resolve(t.at("source").get<std::string>());
      task.target = resolve(t.at("target").get<std::string>());
      if (t.contains("truth") && !t["truth"].is_null()) {
        task.truth = resolve(t["truth"].get<std::string>());
      }
      if (t.contains("config")) task.overrides = t["config"];
      m.tasks.push_back(std::move(task));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  if (m.tasks.empty()) throw InvalidArgument("manifest: no tasks");
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest(j, path.parent_path());
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dmmd

#include "dmmd/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "dmmd/dataio.hpp"
#include "dmmd/errors.hpp"
#include "dmmd/laplacian.hpp"
#include "dmmd/pipeline.hpp"
#include "dmmd/serialize.hpp"
#include "dmmd/statistics.hpp"

namespace dmmd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// verify

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) x(i, j) = g(rng);
  }
  return x;
}

// Random features with a random per-feature offset and scale so the
// centering steps are exercised.
Eigen::MatrixXd random_data(std::mt19937_64& rng, Index m, Index n) {
  std::uniform_real_distribution<double> offset(-5.0, 5.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  Eigen::MatrixXd x = random_matrix(rng, m, n);
  for (Index i = 0; i < m; ++i) x.row(i) = x.row(i).array() * scale(rng) + offset(rng);
  return x;
}

Labels random_labels(std::mt19937_64& rng, Index n, int num_classes) {
  std::uniform_int_distribution<int> pick(1, num_classes);
  Labels y(static_cast<std::size_t>(n));
  for (auto& v : y) v = pick(rng);
  return y;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void track(SuiteMax& s, double residual, std::uint64_t seed, const std::string& dims) {
  if (residual > s.residual || s.dims.empty()) {
    s.residual = std::max(s.residual, residual);
    s.instance_seed = seed;
    s.dims = dims;
  }
}

std::string dims_string(Index m, Index n, int c) {
  return "m=" + std::to_string(m) + " n=" + std::to_string(n) + " C=" + std::to_string(c);
}

}  // namespace

VerifyReport verify_identities(const VerifyOptions& opts) {
  if (opts.trials < 1) throw InvalidArgument("verify: trials must be >= 1");
  VerifyReport rep;
  for (int t = 0; t < opts.trials; ++t) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(seed);
    const Index m = uniform_int(rng, 1, 10);
    const int num_classes = uniform_int(rng, 1, 5);
    const Index n = uniform_int(rng, 2, 50);
    const Index k = uniform_int(rng, 1, static_cast<int>(m));

    LabeledData d{random_data(rng, m, n), random_labels(rng, n, num_classes), num_classes};
    const Eigen::MatrixXd a = random_matrix(rng, m, k);
    const std::string dims = dims_string(m, n, num_classes);
    track(rep.lemma1, verify_lemma1(d, a), seed, dims + " k=" + std::to_string(k));
    track(rep.lemma2, verify_lemma2(d), seed, dims);

    const Index n_s = uniform_int(rng, 1, 25);
    const Index n_t = uniform_int(rng, 1, 25);
    LabeledData src{random_data(rng, m, n_s), random_labels(rng, n_s, num_classes), num_classes};
    LabeledData tgt{random_data(rng, m, n_t), random_labels(rng, n_t, num_classes), num_classes};
    const int c = uniform_int(rng, 1, num_classes);
    src.y[0] = c;
    tgt.y[0] = c;
    const std::string pair_dims = "m=" + std::to_string(m) + " n_s=" + std::to_string(n_s) +
                                  " n_t=" + std::to_string(n_t) + " C=" +
                                  std::to_string(num_classes);
    track(rep.lemma3, verify_lemma3(src, tgt, a, c), seed,
          pair_dims + " k=" + std::to_string(k) + " c=" + std::to_string(c));

    for (int cls = 1; cls <= num_classes; ++cls) {
      if (class_indices(src.y, cls).empty() || class_indices(tgt.y, cls).empty()) continue;
      const ClassLaplacianSet set = build_class_set(src.y, tgt.y, cls);
      const MmdMatrix mc = build_mc(src.y, tgt.y, cls);
      const double gap =
          (set.weight * (set.l_v.dense() - set.l_w.dense()) - mc.m.dense()).cwiseAbs().maxCoeff();
      track(rep.laplacian_oracle, gap, seed, pair_dims + " c=" + std::to_string(cls));
    }
  }
  rep.passed = rep.lemma1.residual <= opts.tolerance && rep.lemma2.residual <= opts.tolerance &&
               rep.lemma3.residual <= opts.tolerance &&
               rep.laplacian_oracle.residual <= opts.tolerance;
  return rep;
}

namespace {

// ---------------------------------------------------------------------------
// shared flag handling

struct ConfigFlags {
  std::string strategy = "s1";
  std::string preset;
  std::string classifier;
  std::string normalize;
  std::string metric;
  std::string weight_mode;
  std::string variant;
  Index k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double ridge = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  int t_iters = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opts;
};

void add_config_flags(CLI::App* app, ConfigFlags& f, bool with_strategy, bool strategy_required) {
  if (with_strategy) {
    auto* o = app->add_option("--strategy", f.strategy, "baseline | s1 | s2 | ablation");
    if (strategy_required) o->required();
    f.opts["strategy"] = o;
  }
  f.opts["preset"] = app->add_option("--preset", f.preset, "small (k=20, alpha=0.05) | large (k=100, alpha=0.1)");
  f.opts["k"] = app->add_option("--k", f.k, "subspace dimension");
  f.opts["alpha"] = app->add_option("--alpha", f.alpha, "projection regularizer");
  f.opts["beta"] = app->add_option("--beta", f.beta, "Strategy I trade-off in [-1, 1]");
  f.opts["lambda"] = app->add_option("--lambda", f.lambda, "Strategy II balance in [0, 1]");
  f.opts["T"] = app->add_option("--T", f.t_iters, "iterations");
  f.opts["p"] = app->add_option("--p", f.p, "graph neighbours");
  f.opts["classifier"] = app->add_option("--classifier", f.classifier, "glp | one_nn");
  f.opts["normalize"] = app->add_option("--normalize", f.normalize, "none | zscore | zscore+l2");
  f.opts["metric"] = app->add_option("--metric", f.metric, "cosine | euclidean-gaussian");
  f.opts["weight_mode"] = app->add_option("--weight-mode", f.weight_mode, "product | sum");
  f.opts["variant"] = app->add_option("--variant", f.variant, "ablation variant Dtra | Dter | Both");
  f.opts["gamma1"] = app->add_option("--gamma1", f.gamma1, "ablation within-class weight");
  f.opts["gamma2"] = app->add_option("--gamma2", f.gamma2, "ablation between-class weight");
  f.opts["ridge"] = app->add_option("--ridge", f.ridge, "initial ridge on the constraint matrix");
  f.opts["seed"] = app->add_option("--seed", f.seed, "seed echoed into the result");
}

bool given(const ConfigFlags& f, const std::string& name) {
  const auto it = f.opts.find(name);
  return it != f.opts.end() && it->second->count() > 0;
}

AdaptConfig build_config(const ConfigFlags& f) {
  AdaptConfig cfg;
  if (given(f, "preset")) apply_preset(cfg, parse_preset(f.preset));
  if (given(f, "strategy")) cfg.strategy = parse_strategy(f.strategy);
  if (given(f, "k")) cfg.k = f.k;
  if (given(f, "alpha")) cfg.alpha = f.alpha;
  if (given(f, "beta")) cfg.beta = f.beta;
  if (given(f, "lambda")) cfg.lambda = f.lambda;
  if (given(f, "T")) cfg.t_iters = f.t_iters;
  if (given(f, "p")) cfg.p_neighbors = f.p;
  if (given(f, "classifier")) cfg.classifier = parse_classifier(f.classifier);
  if (given(f, "normalize")) cfg.normalize = parse_normalize_mode(f.normalize);
  if (given(f, "metric")) cfg.metric = parse_metric(f.metric);
  if (given(f, "weight_mode")) cfg.weight_mode = parse_weight_mode(f.weight_mode);
  if (given(f, "variant")) cfg.variant = parse_variant(f.variant);
  if (given(f, "gamma1")) cfg.gamma1 = f.gamma1;
  if (given(f, "gamma2")) cfg.gamma2 = f.gamma2;
  if (given(f, "ridge")) cfg.ridge = f.ridge;
  if (given(f, "seed")) cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

struct LoadedTask {
  LabeledData source;
  Eigen::MatrixXd target_x;
  std::optional<Labels> truth;
  RunInputs inputs;
};

// Target rows that carry labels are used for scoring only.
LoadedTask load_task(const fs::path& source, const fs::path& target,
                     const std::optional<fs::path>& truth, bool header) {
  LoadedTask t;
  t.source = load_domain_csv(source, header).as_labeled();
  const DomainFile tgt = load_domain_csv(target, header);
  if (tgt.m() != t.source.dim()) {
    throw InvalidArgument("source has " + std::to_string(t.source.dim()) +
                          " features but target has " + std::to_string(tgt.m()));
  }
  t.target_x = tgt.x;
  if (truth) {
    t.truth = load_labels(*truth);
    if (static_cast<Index>(t.truth->size()) != tgt.n()) {
      throw InvalidArgument("truth file has " + std::to_string(t.truth->size()) +
                            " labels for " + std::to_string(tgt.n()) + " target samples");
    }
  } else if (tgt.labeled()) {
    t.truth = tgt.y;
  }
  t.inputs = {source.string(), target.string(),
              truth ? std::optional<std::string>(truth->string()) : std::nullopt};
  return t;
}

std::string percent(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

// ---------------------------------------------------------------------------
// commands

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  const VerifyReport rep = verify_identities(opts);
  auto line = [&](const char* name, const SuiteMax& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", s.residual);
    out << name << " max residual " << buf << "  (seed " << s.instance_seed << ", " << s.dims
        << ")\n";
  };
  out << "trials " << opts.trials << ", seed " << opts.seed << ", tolerance " << opts.tolerance
      << "\n";
  line("lemma1 (pairwise inter-class)  ", rep.lemma1);
  line("lemma2 (S_v = S_w + S_b)       ", rep.lemma2);
  line("lemma3 (MMD = w (S_v - S_w))   ", rep.lemma3);
  line("laplacian oracle (w(Lv-Lw)=M_c)", rep.laplacian_oracle);
  if (!rep.passed) {
    for (const auto* s : {&rep.lemma1, &rep.lemma2, &rep.lemma3, &rep.laplacian_oracle}) {
      if (s->residual > opts.tolerance) {
        err << "FAIL: residual " << s->residual << " exceeds tolerance " << opts.tolerance
            << " at instance seed " << s->instance_seed << " (" << s->dims << ")\n";
      }
    }
    out << "FAIL\n";
    return kExitFailure;
  }
  out << "PASS\n";
  return kExitOk;
}

struct AdaptArgs {
  std::string source, target, truth, out, dump;
  bool header = false;
  ConfigFlags flags;
};

int cmd_adapt(const AdaptArgs& a, std::ostream& out, std::ostream& err) {
  AdaptConfig cfg;
  LoadedTask task;
  try {
    cfg = build_config(a.flags);
    task = load_task(a.source, a.target,
                     a.truth.empty() ? std::nullopt : std::optional<fs::path>(a.truth), a.header);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const AdaptResult r = adapt(task.source, task.target_x, task.truth, cfg);
  const json doc = result_to_json(r, task.inputs);
  if (a.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_json(a.out, doc);
  }
  if (!a.dump.empty()) {
    save_domain_csv(a.dump + "_source.csv", r.z_source, task.source.y);
    save_domain_csv(a.dump + "_target.csv", r.z_target, r.final_labels);
  }
  err << "strategy " << to_string(cfg.strategy) << ", " << r.per_iteration.size()
      << " iterations, final accuracy " << percent(r.final_accuracy) << "\n";
  return kExitOk;
}

int cmd_ablate(const AdaptArgs& a, unsigned jobs, std::ostream& out, std::ostream& err) {
  AdaptConfig cfg;
  LoadedTask task;
  try {
    cfg = build_config(a.flags);
    task = load_task(a.source, a.target,
                     a.truth.empty() ? std::nullopt : std::optional<fs::path>(a.truth), a.header);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto rows = run_ablation_suite(task.source, task.target_x, task.truth, cfg, jobs);
  std::optional<double> no_adapt;
  if (task.truth) {
    no_adapt = evaluate_accuracy(no_adaptation_labels(task.source, task.target_x, cfg.normalize),
                                 *task.truth);
  }
  const json doc = suite_to_json(rows, task.inputs, no_adapt);
  if (!a.out.empty()) write_json(a.out, doc);

  out << "method            accuracy(%)\n";
  out << "1-NN (no adapt)   " << percent(no_adapt) << "\n";
  for (const auto& row : rows) {
    std::string name = row.name;
    name.resize(std::max<std::size_t>(name.size(), 18), ' ');
    out << name << percent(row.result.final_accuracy) << "\n";
  }
  if (a.out.empty()) out << doc.dump(2) << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out_dir;
  SynthSpec spec;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthData d;
  try {
    d = synth_shifted_gaussians(a.spec);
    fs::create_directories(a.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const fs::path dir(a.out_dir);
  save_domain_csv(dir / "source.csv", d.source.x, d.source.y);
  save_domain_csv(dir / "target.csv", d.target_x,
                  Labels(d.target_truth.size(), kUnlabeled));
  save_labels(dir / "truth.csv", d.target_truth);
  const SynthSpec& s = a.spec;
  write_json(dir / "synth.json", {{"schema_version", kSchemaVersion},
                                  {"kind", "synth_spec"},
                                  {"classes", s.num_classes},
                                  {"dim", s.dim},
                                  {"n_per_class_source", s.n_per_class_source},
                                  {"n_per_class_target", s.n_per_class_target},
                                  {"class_sep", s.class_sep},
                                  {"domain_rotation_deg", s.domain_rotation_deg},
                                  {"domain_shift", s.domain_shift},
                                  {"noise_sigma", s.noise_sigma},
                                  {"seed", s.seed}});
  out << "wrote " << (dir / "source.csv").string() << ", " << (dir / "target.csv").string()
      << ", " << (dir / "truth.csv").string() << "\n";
  return kExitOk;
}

struct BenchmarkArgs {
  std::string manifest, out_dir;
  unsigned jobs = 1;
  bool grid_search = false;
  bool header = false;
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  std::vector<AdaptConfig> configs;
  std::vector<LoadedTask> tasks;
  try {
    manifest = load_manifest(a.manifest);
    for (const auto& t : manifest.tasks) {
      AdaptConfig cfg;
      if (manifest.preset) apply_preset(cfg, parse_preset(*manifest.preset));
      apply_config_overrides(cfg, manifest.defaults);
      apply_config_overrides(cfg, t.overrides);
      cfg.validate();
      configs.push_back(cfg);
      for (const auto& p : {t.source, t.target}) {
        if (!fs::exists(p)) throw InvalidArgument("task '" + t.name + "': missing file " + p.string());
      }
      if (t.truth && !fs::exists(*t.truth)) {
        throw InvalidArgument("task '" + t.name + "': missing file " + t.truth->string());
      }
      tasks.push_back(load_task(t.source, t.target, t.truth, a.header));
    }
    fs::create_directories(a.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const bool use_grid = a.grid_search || manifest.grid_search;
  if (use_grid) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (!tasks[i].truth) {
        err << "error: grid search needs target truth for task '" << manifest.tasks[i].name << "'\n";
        return kExitUsage;
      }
    }
  }

  const std::size_t n = tasks.size();
  std::vector<json> docs(n);
  std::vector<std::optional<double>> accuracy(n);
  std::vector<json> selected(n, json::object());
  run_indexed(n, a.jobs, [&](std::size_t i) {
    const auto grid = default_grid(configs[i].strategy);
    if (use_grid && !grid.empty()) {
      GridSearchResult gs =
          grid_search(tasks[i].source, tasks[i].target_x, *tasks[i].truth, configs[i], grid);
      docs[i] = result_to_json(gs.best_result, tasks[i].inputs);
      json table = json::array();
      for (const auto& pt : gs.table) {
        json row = {{"accuracy", pt.accuracy}};
        for (const auto& axis : grid) row[axis.param] = config_to_json(pt.config)[axis.param];
        table.push_back(row);
      }
      docs[i]["grid"] = {{"best_index", gs.best_index}, {"points", table}};
      for (const auto& axis : grid) selected[i][axis.param] = config_to_json(gs.best)[axis.param];
      accuracy[i] = gs.best_accuracy;
    } else {
      const AdaptResult r = adapt(tasks[i].source, tasks[i].target_x, tasks[i].truth, configs[i]);
      docs[i] = result_to_json(r, tasks[i].inputs);
      accuracy[i] = r.final_accuracy;
    }
    docs[i]["task"] = manifest.tasks[i].name;
  });

  json rows = json::array();
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    write_json(fs::path(a.out_dir) / (manifest.tasks[i].name + ".json"), docs[i]);
    rows.push_back({{"name", manifest.tasks[i].name},
                    {"strategy", to_string(configs[i].strategy)},
                    {"final_accuracy", accuracy[i] ? json(*accuracy[i]) : json(nullptr)},
                    {"selected", selected[i]}});
    if (accuracy[i]) {
      sum += *accuracy[i];
      ++scored;
    }
  }
  const std::optional<double> mean =
      scored ? std::optional<double>(sum / static_cast<double>(scored)) : std::nullopt;
  write_json(fs::path(a.out_dir) / "summary.json",
             {{"schema_version", kSchemaVersion},
              {"kind", "benchmark_summary"},
              {"grid_search", use_grid},
              {"tasks", rows},
              {"mean_accuracy", mean ? json(*mean) : json(nullptr)}});

  out << "Methods/Tasks";
  for (const auto& t : manifest.tasks) out << " | " << t.name;
  out << " | average\n";
  out << "accuracy(%)  ";
  for (const auto& acc : accuracy) out << " | " << percent(acc);
  out << " | " << percent(mean) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discriminative MMD domain adaptation toolkit", "dmmd"};
  app.require_subcommand(1);

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "check the scatter/MMD identities on random instances");
  verify->add_option("--trials", verify_opts.trials, "random instances")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_opts.seed, "base seed");
  verify->add_option("--tolerance", verify_opts.tolerance, "largest accepted residual");

  AdaptArgs adapt_args;
  auto* adapt_cmd = app.add_subcommand("adapt", "run the iterative adaptation on one task");
  adapt_cmd->add_option("--source", adapt_args.source, "labeled source CSV")->required()->check(CLI::ExistingFile);
  adapt_cmd->add_option("--target", adapt_args.target, "target CSV")->required()->check(CLI::ExistingFile);
  adapt_cmd->add_option("--truth", adapt_args.truth, "target truth labels, one per line")->check(CLI::ExistingFile);
  adapt_cmd->add_option("--out", adapt_args.out, "result JSON (stdout when omitted)");
  adapt_cmd->add_option("--dump-embeddings", adapt_args.dump, "write <prefix>_source.csv and <prefix>_target.csv");
  adapt_cmd->add_flag("--header", adapt_args.header, "CSV files start with a header row");
  add_config_flags(adapt_cmd, adapt_args.flags, true, true);

  AdaptArgs ablate_args;
  unsigned ablate_jobs = 1;
  auto* ablate = app.add_subcommand("ablate", "MMD vs D_tra/D_ter variants vs both strategies");
  ablate->add_option("--source", ablate_args.source, "labeled source CSV")->required()->check(CLI::ExistingFile);
  ablate->add_option("--target", ablate_args.target, "target CSV")->required()->check(CLI::ExistingFile);
  ablate->add_option("--truth", ablate_args.truth, "target truth labels")->check(CLI::ExistingFile);
  ablate->add_option("--out", ablate_args.out, "comparison JSON");
  ablate->add_option("--jobs", ablate_jobs, "parallel runs")->check(CLI::PositiveNumber);
  ablate->add_flag("--header", ablate_args.header, "CSV files start with a header row");
  add_config_flags(ablate, ablate_args.flags, false, false);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "write a shifted-Gaussian source/target pair");
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth->add_option("--classes", synth_args.spec.num_classes);
  synth->add_option("--dim", synth_args.spec.dim);
  synth->add_option("--n-source", synth_args.spec.n_per_class_source, "source samples per class");
  synth->add_option("--n-target", synth_args.spec.n_per_class_target, "target samples per class");
  synth->add_option("--sep", synth_args.spec.class_sep, "distance between class means");
  synth->add_option("--rotation", synth_args.spec.domain_rotation_deg, "target rotation in degrees");
  synth->add_option("--shift", synth_args.spec.domain_shift, "target offset length");
  synth->add_option("--sigma", synth_args.spec.noise_sigma, "noise standard deviation");
  synth->add_option("--seed", synth_args.spec.seed);

  BenchmarkArgs bench_args;
  auto* bench = app.add_subcommand("benchmark", "run every task of a JSON manifest");
  bench->add_option("--manifest", bench_args.manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out-dir", bench_args.out_dir, "directory for per-task results and summary.json")->required();
  bench->add_option("--jobs", bench_args.jobs, "tasks run concurrently")->check(CLI::PositiveNumber);
  bench->add_flag("--grid-search", bench_args.grid_search, "select beta/lambda on the default grid by target accuracy");
  bench->add_flag("--header", bench_args.header, "CSV files start with a header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(verify_opts, out, err);
    if (*adapt_cmd) return cmd_adapt(adapt_args, out, err);
    if (*ablate) return cmd_ablate(ablate_args, ablate_jobs, out, err);
    if (*synth) return cmd_synth(synth_args, out, err);
    if (*bench) return cmd_benchmark(bench_args, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dmmd::cli

#include "greenport/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>

#include "CLI11.hpp"
#include "greenport/data/csv.hpp"
#include "greenport/numeric/kernels.hpp"
#include "greenport/trainer/checkpoint.hpp"
#include "greenport/trainer/curve_io.hpp"

namespace greenport::cli {

using nlohmann::json;

namespace {

// Anything that is not the user's fault: exit code 1.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw RuntimeFailure("cannot create output directory " + dir.string());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw RuntimeFailure("cannot write " + path.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::size_t phase_index(const ScenarioConfig& cfg, const std::string& label) {
  for (std::size_t i = 0; i < cfg.phases.size(); ++i) {
    if (cfg.phases[i].label == label) return i;
  }
  throw ValidationError("--phase: unknown phase '" + label + "'");
}

}  // namespace

void cmd_generate(const ExperimentSpec& spec, std::ostream& log) {
  std::vector<const GreenhouseSource*> todo;
  for (const auto& g : spec.greenhouses) {
    if (!g.csv) todo.push_back(&g);
  }
  ensure_dir(spec.output_dir);

  // Independent per-greenhouse streams, so generation can fan out.
  const SeededRng root(spec.seed);
  std::vector<std::future<std::vector<ClimateRecord>>> jobs;
  for (const auto* g : todo) {
    jobs.push_back(std::async(std::launch::async, [g, rng = root.split("generator/" + g->name)]() mutable {
      return generate_series(g->params, g->days, rng);
    }));
  }

  json manifest;
  manifest["seed"] = spec.seed;
  manifest["preset"] = spec.preset;
  manifest["greenhouses"] = json::array();
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto records = jobs[i].get();
    const auto path = spec.dataset_path(*todo[i]);
    try {
      write_csv(path, records);
    } catch (const DataError& e) {
      throw RuntimeFailure(e.what());
    }
    manifest["greenhouses"].push_back({{"name", todo[i]->name},
                                       {"days", todo[i]->days},
                                       {"records", records.size()},
                                       {"file", path.filename().string()},
                                       {"params", greenhouse_params_json(todo[i]->params)}});
    log << "generated " << path.string() << " (" << records.size() << " records)\n";
  }
  write_text(spec.output_dir / "manifest.json", manifest.dump(2) + "\n");
}

ScenarioConfig build_scenario(const ExperimentSpec& spec, std::size_t* clamp_count) {
  ScenarioConfig cfg;
  cfg.batch_size = spec.batch_size;
  cfg.replay_size = spec.replay_size;
  cfg.eval_every = spec.eval_every;
  cfg.test_size = spec.test_size;
  cfg.seed = spec.seed;
  cfg.retention = spec.retention;
  cfg.track_memory = spec.dump_memory;
  cfg.model = spec.model;
  cfg.memory = spec.memory;

  Normalizer normalizer(spec.bounds);
  const SeededRng root(spec.seed);
  for (const auto& g : spec.greenhouses) {
    const auto path = spec.dataset_path(g);
    if (!std::filesystem::exists(path)) throw ValidationError("dataset not found: " + path.string());
    const auto records = read_csv(path);
    SeededRng test_rng = root.split("test-sampling/" + g.name);
    try {
      cfg.phases.push_back(
          build_phase(g.name, records, spec.model.window_len, spec.stride, spec.test_size, normalizer, test_rng));
    } catch (const TrainerError& e) {
      throw ValidationError(e.what());
    }
  }
  if (clamp_count != nullptr) *clamp_count = normalizer.clamp_count();
  return cfg;
}

void cmd_run(const ExperimentSpec& spec, std::ostream& log) {
  std::size_t clamps = 0;
  const ScenarioConfig cfg = build_scenario(spec, &clamps);
  ensure_dir(spec.output_dir);
  if (clamps > 0) log << "warning: " << clamps << " values clamped during normalization\n";

  const auto result = run_scenario(cfg);
  const auto& curve = result.log.curve;
  write_curve_csv(spec.output_dir / "curve.csv", curve);
  save_checkpoint(spec.output_dir / "checkpoint.bin", result.state);
  if (spec.retention) write_retention_csv(spec.output_dir / "retention.csv", result.log.retention);
  if (spec.dump_memory) write_memory_csv(spec.output_dir / "memory.csv", result.log.memory_trace);

  json summary;
  summary["updates"] = result.state.update_index;
  summary["eval_points"] = curve.points.size();
  summary["phase_boundaries"] = curve.phase_boundaries();
  summary["clamp_count"] = clamps;
  summary["replay_size"] = spec.replay_size;
  summary["memory_strategy"] = strategy_name(spec.memory.strategy);
  summary["final_memory"] = json::array();
  for (const auto& s : result.state.memory.occupancy_stats()) {
    summary["final_memory"].push_back({{"label", s.label}, {"count", s.count}, {"fraction", s.fraction}});
  }
  write_text(spec.output_dir / "run_summary.json", summary.dump(2) + "\n");

  log << "run: " << result.state.update_index << " updates, " << curve.points.size() << " evaluations, "
      << curve.phase_boundaries().size() << " phase boundaries -> " << (spec.output_dir / "curve.csv").string()
      << '\n';
}

void cmd_baseline(const ExperimentSpec& spec, const std::string& phase, std::ostream& log) {
  const ScenarioConfig cfg = build_scenario(spec);
  const std::size_t index = phase_index(cfg, phase);
  ensure_dir(spec.output_dir);
  ScenarioResult result;
  try {
    result = run_baseline(cfg, index);
  } catch (const TrainerError& e) {
    throw ValidationError(e.what());
  }
  const auto path = spec.output_dir / ("baseline_" + phase + ".csv");
  write_curve_csv(path, result.log.curve);
  log << "baseline " << phase << ": offset " << result.log.curve.phases.front().start_update << ", "
      << result.log.curve.points.size() << " evaluations -> " << path.string() << '\n';
}

std::vector<ComparisonRow> compare_curves(const LearningCurve& run, const std::vector<LearningCurve>& baselines) {
  std::vector<ComparisonRow> rows;
  for (const auto& base : baselines) {
    if (base.phases.empty()) throw ValidationError("compare: baseline curve has no phase boundary");
    const auto& start = base.phases.front();
    const auto it = std::find_if(run.phases.begin(), run.phases.end(),
                                 [&](const PhaseStart& p) { return p.phase == start.phase; });
    if (it == run.phases.end()) throw ValidationError("compare: run has no phase '" + start.phase + "'");
    if (it->start_update != start.start_update) {
      throw ValidationError("compare: baseline for '" + start.phase + "' starts at update " +
                            std::to_string(start.start_update) + ", run phase starts at " +
                            std::to_string(it->start_update));
    }

    std::vector<const EvalPoint*> run_pts, base_pts;
    for (const auto& p : run.points)
      if (p.phase == start.phase) run_pts.push_back(&p);
    for (const auto& p : base.points)
      if (p.phase == start.phase) base_pts.push_back(&p);
    if (run_pts.empty() || base_pts.empty()) {
      throw ValidationError("compare: no evaluation points for phase '" + start.phase + "'");
    }
    const bool same_cadence =
        std::equal(run_pts.begin(), run_pts.end(), base_pts.begin(), base_pts.end(),
                   [](const EvalPoint* a, const EvalPoint* b) { return a->update_index == b->update_index; });
    if (!same_cadence) throw ValidationError("compare: cadence mismatch for phase '" + start.phase + "'");

    ComparisonRow row;
    row.phase = start.phase;
    row.start_update = start.start_update;
    row.transferred_first_mse = run_pts.front()->mse_total;
    row.fresh_first_mse = base_pts.front()->mse_total;
    if (row.fresh_first_mse > 0.0) {
      row.ratio = row.transferred_first_mse / row.fresh_first_mse;
    } else {
      row.ratio = row.transferred_first_mse > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    row.pass = row.transferred_first_mse < row.fresh_first_mse;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ComparisonRow> cmd_compare(const std::filesystem::path& run_curve,
                                       const std::vector<std::filesystem::path>& baseline_curves,
                                       const std::filesystem::path& out_dir, std::ostream& log) {
  auto load = [](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) throw ValidationError("curve not found: " + p.string());
    try {
      return read_curve(p);
    } catch (const TrainerError& e) {
      throw ValidationError(e.what());
    }
  };
  if (baseline_curves.empty()) throw ValidationError("compare: no baseline curves given or found");
  const LearningCurve run = load(run_curve);
  std::vector<LearningCurve> baselines;
  for (const auto& p : baseline_curves) baselines.push_back(load(p));
  const auto rows = compare_curves(run, baselines);

  std::string table = "phase,start_update,transferred_first_mse,fresh_first_mse,ratio,result\n";
  for (const auto& r : rows) {
    table += r.phase + "," + std::to_string(r.start_update) + "," + fmt(r.transferred_first_mse) + "," +
             fmt(r.fresh_first_mse) + "," + fmt(r.ratio) + "," + (r.pass ? "pass" : "fail") + "\n";
  }
  ensure_dir(out_dir);
  write_text(out_dir / "comparison.csv", table);
  log << table;
  return rows;
}

namespace {

std::vector<std::filesystem::path> discover_baselines(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("baseline_") && name.ends_with(".csv") && !name.ends_with(".boundaries.csv")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"greenport: continual learning of greenhouse crop models with episodic replay"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::optional<std::string> spec_path;
  Overrides ov;
  std::string phase;
  std::optional<std::string> curve_path;
  std::vector<std::string> baseline_paths;

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", spec_path, "Experiment JSON file (see schema/experiment.schema.json)");
    sub->add_option("--seed", ov.seed, "Root seed; overrides the spec");
    sub->add_option("--out", ov.output_dir, "Output directory; overrides the spec");
    sub->add_option("--preset", ov.preset, "Default bundle: desk (minutes) or paper (full-scale protocol)")
        ->check(CLI::IsMember({"desk", "paper"}));
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--replay-size", ov.replay_size, "Replayed samples per update; 0 disables replay");
    sub->add_option("--memory-strategy", ov.memory_strategy, "Episodic memory substitution rule")
        ->check(CLI::IsMember({"per-element", "per-sample", "per-batch"}));
    sub->add_flag("--retention", ov.retention, "Also evaluate on earlier greenhouses' test sets (retention.csv)");
    sub->add_flag("--dump-memory", ov.dump_memory, "Write memory origin fractions after each update (memory.csv)");
  };

  auto* gen = app.add_subcommand("generate", "Generate synthetic greenhouse CSV files and a manifest");
  add_spec(gen);
  auto* run = app.add_subcommand("run", "Train online across all greenhouses in order; write the learning curve");
  add_spec(run);
  add_training(run);
  auto* base = app.add_subcommand("baseline", "Train a fresh model on one greenhouse only, aligned to the run");
  add_spec(base);
  add_training(base);
  base->add_option("--phase", phase, "Greenhouse name to train the baseline on")->required();
  auto* cmp = app.add_subcommand("compare", "Compare first evaluations of the transferred and fresh models");
  cmp->add_option("--spec", spec_path, "Experiment JSON file; supplies the output directory");
  cmp->add_option("--out", ov.output_dir, "Directory holding curve.csv and baseline_*.csv");
  cmp->add_option("--curve", curve_path, "Run curve CSV (default: <out>/curve.csv)");
  cmp->add_option("--baseline", baseline_paths, "Baseline curve CSV; repeatable (default: <out>/baseline_*.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    const std::optional<std::filesystem::path> spec_file =
        spec_path ? std::optional<std::filesystem::path>(*spec_path) : std::nullopt;
    if (gen->parsed()) {
      cmd_generate(load_experiment(spec_file, ov), out);
    } else if (run->parsed()) {
      cmd_run(load_experiment(spec_file, ov), out);
    } else if (base->parsed()) {
      cmd_baseline(load_experiment(spec_file, ov), phase, out);
    } else if (cmp->parsed()) {
      const auto spec = load_experiment(spec_file, ov);
      const std::filesystem::path curve = curve_path ? std::filesystem::path(*curve_path) : spec.output_dir / "curve.csv";
      std::vector<std::filesystem::path> baselines(baseline_paths.begin(), baseline_paths.end());
      if (baselines.empty()) baselines = discover_baselines(spec.output_dir);
      cmd_compare(curve, baselines, spec.output_dir, out);
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: runtime: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace greenport::cli

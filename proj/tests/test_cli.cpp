#include <sstream>

#include "doctest.h"
#include "greenport/cli/commands.hpp"
#include "greenport/trainer/curve_io.hpp"
#include "support.hpp"

using namespace greenport;
using namespace greenport::cli;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "greenport");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string validation_message(const json& doc) {
  try {
    (void)parse_experiment(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

// Small enough to run the full pipeline in about a second.
json quick_spec(const std::filesystem::path& out) {
  return {{"seed", 5},
          {"output_dir", out.string()},
          {"greenhouses", {{{"name", "GH-A"}, {"days", 2}}, {{"name", "GH-C"}, {"preset", "GH-C"}, {"days", 2}}}},
          {"model", {{"hidden_dim", 4}, {"dense_dim", 4}}},
          {"memory", {{"capacity", 300}}},
          {"scenario", {{"window_len", 8}, {"test_size", 50}}}};
}

std::filesystem::path write_spec(const std::filesystem::path& dir, const json& doc) {
  const auto path = dir / "spec.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("paper preset protocol constants") {
  const auto spec = parse_experiment({{"preset", "paper"}});
  CHECK(spec.model.window_len == 250);
  CHECK(spec.stride == 2);
  CHECK(spec.batch_size == 100);
  CHECK(spec.memory.capacity == 10000);
  CHECK(spec.memory.substitution_probability == 0.1);
  CHECK(spec.eval_every == 3);
  CHECK(spec.test_size == 10000);
  CHECK(spec.replay_size == 100);
}

TEST_CASE("desk preset") {
  const auto spec = parse_experiment(json::object());
  CHECK(spec.preset == "desk");
  CHECK(spec.model.window_len == 50);
  CHECK(spec.model.hidden_dim == 16);
  CHECK(spec.test_size == 1000);
  REQUIRE(spec.greenhouses.size() == 3);
  CHECK(spec.greenhouses[0].days == 30);
  CHECK(spec.greenhouses[2].name == "GH-C");
  CHECK(spec.dataset_path(spec.greenhouses[1]) == std::filesystem::path("out") / "GH-B.csv");
}

TEST_CASE("overrides win over the document") {
  Overrides ov;
  ov.seed = 99;
  ov.replay_size = 0;
  ov.memory_strategy = "per-element";
  ov.preset = "paper";
  ov.retention = true;
  const auto spec = parse_experiment({{"seed", 3}, {"preset", "desk"}, {"scenario", {{"replay_size", 7}}}}, ov);
  CHECK(spec.seed == 99);
  CHECK(spec.replay_size == 0);
  CHECK(spec.memory.strategy == MemoryStrategy::PerElement);
  CHECK(spec.model.window_len == 250);
  CHECK(spec.retention);
}

TEST_CASE("validation errors name the key") {
  CHECK(validation_message({{"bogus", 1}}).find("bogus") != std::string::npos);
  CHECK(validation_message({{"model", {{"hiden_dim", 3}}}}).find("model.hiden_dim") != std::string::npos);
  CHECK(validation_message({{"scenario", {{"batch_size", 0}}}}).find("scenario.batch_size") != std::string::npos);
  CHECK(validation_message({{"scenario", {{"stride", -1}}}}).find("scenario.stride") != std::string::npos);
  CHECK(validation_message({{"greenhouses", {{{"name", "X"}, {"params", {{"day_length_h", 25}}}}}}})
            .find("greenhouses[0].params") != std::string::npos);
  CHECK(validation_message({{"greenhouses", {{{"name", "a,b"}}}}}).find("greenhouses[0].name") != std::string::npos);
  CHECK(validation_message({{"greenhouses", {{{"name", "X"}}, {{"name", "X"}}}}}).find("duplicate") !=
        std::string::npos);
  CHECK(validation_message({{"greenhouses", {{{"name", "X"}, {"csv", "x.csv"}, {"days", 3}}}}})
            .find("greenhouses[0].csv") != std::string::npos);
  CHECK(validation_message({{"memory", {{"substitution_probability", 1.5}}}}).find("memory.substitution_probability") !=
        std::string::npos);
  CHECK(validation_message({{"memory", {{"strategy", "lru"}}}}).find("memory.strategy") != std::string::npos);
  CHECK(validation_message({{"normalizer", {{"co2", {5, 1}}}}}).find("normalizer.co2") != std::string::npos);
  CHECK(validation_message({{"preset", "huge"}}).find("preset") != std::string::npos);
  CHECK(validation_message({{"model", {{"learning_rate", 0}}}}).find("model") != std::string::npos);
}

TEST_CASE("help documents every flag") {
  const auto top = invoke({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"generate", "run", "baseline", "compare"}) CHECK(top.out.find(sub) != std::string::npos);
  const auto all = invoke({"--help-all"});
  for (const char* flag : {"--spec", "--seed", "--out", "--preset", "--replay-size", "--memory-strategy", "--retention",
                           "--dump-memory", "--phase", "--curve", "--baseline"}) {
    CHECK(all.out.find(flag) != std::string::npos);
  }
  CHECK(invoke({"run", "--help"}).out.find("--memory-strategy") != std::string::npos);
}

TEST_CASE("usage and validation exit codes") {
  const auto none = invoke({});
  CHECK(none.code == 2);
  CHECK(none.err.rfind("error: usage:", 0) == 0);
  CHECK(invoke({"run", "--memory-strategy", "lru"}).code == 2);
  CHECK(invoke({"run", "--preset", "huge"}).code == 2);
  CHECK(invoke({"baseline"}).code == 2);  // --phase is required

  const auto dir = testing::scratch_dir("cli_codes");
  const auto missing = invoke({"run", "--out", (dir / "nothing").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find((dir / "nothing" / "GH-A.csv").string()) != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  const auto bad_spec = write_spec(dir, {{"greenhouses", {{{"name", "X"}, {"params", {{"day_length_h", 25}}}}}},
                                         {"output_dir", (dir / "gen").string()}});
  const auto r = invoke({"generate", "--spec", bad_spec.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("day_length_h") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "gen"));  // nothing written
}

TEST_CASE("generate writes one file per greenhouse, deterministically") {
  const auto dir = testing::scratch_dir("cli_generate");
  const auto spec = write_spec(dir, {{"greenhouses", {{{"name", "GH-A"}, {"days", 3}}, {{"name", "GH-B"}, {"preset", "GH-B"}, {"days", 3}}}}});
  REQUIRE(invoke({"generate", "--spec", spec.string(), "--seed", "4", "--out", (dir / "a").string()}).code == 0);
  REQUIRE(invoke({"generate", "--spec", spec.string(), "--seed", "4", "--out", (dir / "b").string()}).code == 0);
  for (const char* f : {"GH-A.csv", "GH-B.csv", "manifest.json"}) {
    CHECK(testing::slurp(dir / "a" / f) == testing::slurp(dir / "b" / f));
  }
  const auto text = testing::slurp(dir / "a" / "GH-A.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3 * 288 + 1);
  CHECK(testing::slurp(dir / "a" / "GH-A.csv") != testing::slurp(dir / "a" / "GH-B.csv"));
}

TEST_CASE("run, baseline, compare on a small pipeline") {
  const auto dir = testing::scratch_dir("cli_pipeline");
  const auto out = dir / "out";
  const auto spec = write_spec(dir, quick_spec(out)).string();
  REQUIRE(invoke({"generate", "--spec", spec}).code == 0);
  const auto csv_before = testing::slurp(out / "GH-A.csv");
  const auto run = invoke({"run", "--spec", spec, "--retention", "--dump-memory"});
  INFO(run.err);
  REQUIRE(run.code == 0);
  for (const char* f : {"curve.csv", "curve.boundaries.csv", "checkpoint.bin", "retention.csv", "memory.csv",
                        "run_summary.json"}) {
    CHECK(std::filesystem::exists(out / f));
  }
  CHECK(testing::slurp(out / "GH-A.csv") == csv_before);  // inputs untouched
  const auto summary = json::parse(testing::slurp(out / "run_summary.json"));
  CHECK(summary["clamp_count"] == 0);
  CHECK(summary["phase_boundaries"].size() == 1);

  CHECK(invoke({"baseline", "--spec", spec, "--phase", "GH-Z"}).code == 2);
  REQUIRE(invoke({"baseline", "--spec", spec, "--phase", "GH-C"}).code == 0);
  const auto base = read_curve(out / "baseline_GH-C.csv");
  CHECK(base.phases.front().start_update == summary["phase_boundaries"][0].get<std::size_t>());

  const auto cmp = invoke({"compare", "--spec", spec});
  REQUIRE(cmp.code == 0);
  CHECK(cmp.out.rfind("phase,start_update,transferred_first_mse,fresh_first_mse,ratio,result\nGH-C,", 0) == 0);
  CHECK(std::filesystem::exists(out / "comparison.csv"));

  // Replay ablation keeps file formats.
  std::filesystem::create_directories(dir / "abl");
  for (const char* f : {"GH-A.csv", "GH-C.csv"}) std::filesystem::copy(out / f, dir / "abl" / f);
  REQUIRE(invoke({"run", "--spec", spec, "--replay-size", "0", "--out", (dir / "abl").string()}).code == 0);
  const auto abl = read_curve(dir / "abl" / "curve.csv");
  const auto full = read_curve(out / "curve.csv");
  CHECK(abl.phases == full.phases);
  CHECK(abl.points.size() == full.points.size());
  CHECK_FALSE(abl == full);
}

TEST_CASE("baseline of a one-phase spec equals the run") {
  const auto dir = testing::scratch_dir("cli_single");
  auto doc = quick_spec(dir / "out");
  doc["greenhouses"] = {{{"name", "GH-A"}, {"days", 2}}};
  const auto spec = write_spec(dir, doc).string();
  REQUIRE(invoke({"generate", "--spec", spec}).code == 0);
  REQUIRE(invoke({"run", "--spec", spec}).code == 0);
  REQUIRE(invoke({"baseline", "--spec", spec, "--phase", "GH-A"}).code == 0);
  CHECK(testing::slurp(dir / "out" / "curve.csv") == testing::slurp(dir / "out" / "baseline_GH-A.csv"));
}

TEST_CASE("csv-backed greenhouses are ingested") {
  const auto dir = testing::scratch_dir("cli_ingest");
  auto doc = quick_spec(dir / "gen");
  REQUIRE(invoke({"generate", "--spec", write_spec(dir, doc).string()}).code == 0);
  doc["output_dir"] = (dir / "out").string();
  doc["greenhouses"] = {{{"name", "real"}, {"csv", (dir / "gen" / "GH-A.csv").string()}}};
  const auto r = invoke({"run", "--spec", write_spec(dir, doc).string()});
  INFO(r.err);
  CHECK(r.code == 0);
  CHECK(read_curve(dir / "out" / "curve.csv").phases.front().phase == "real");
}

TEST_CASE("compare rules") {
  LearningCurve run;
  run.phases = {{"A", 0}, {"B", 6}};
  run.points = {{3, 1, "A", 0.1, 0.1, 0.1}, {6, 2, "A", 0.05, 0.05, 0.05}, {9, 3, "B", 0.02, 0.02, 0.02},
                {12, 4, "B", 0.01, 0.01, 0.01}};
  LearningCurve base;
  base.phases = {{"B", 6}};
  base.points = {{9, 3, "B", 0.08, 0.08, 0.08}, {12, 4, "B", 0.03, 0.03, 0.03}};

  auto rows = compare_curves(run, {base});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ratio == doctest::Approx(0.25));
  CHECK(rows[0].pass);

  LearningCurve same = base;
  same.points[0].mse_total = 0.02;
  rows = compare_curves(run, {same});
  CHECK(rows[0].ratio == 1.0);
  CHECK_FALSE(rows[0].pass);

  LearningCurve cadence = base;
  cadence.points = {{8, 2, "B", 0.08, 0.08, 0.08}};
  CHECK_THROWS_WITH_AS(compare_curves(run, {cadence}), doctest::Contains("cadence"), ValidationError);

  LearningCurve no_boundary = base;
  no_boundary.phases.clear();
  CHECK_THROWS_AS(compare_curves(run, {no_boundary}), ValidationError);

  LearningCurve shifted = base;
  shifted.phases = {{"B", 5}};
  CHECK_THROWS_AS(compare_curves(run, {shifted}), ValidationError);
}

TEST_CASE("bundled example spec loads") {
  const auto spec = load_experiment(std::filesystem::path(GREENPORT_SOURCE_DIR) / "schema" / "three_greenhouses.json");
  CHECK(spec.seed == 7);
  REQUIRE(spec.greenhouses.size() == 3);
  CHECK(spec.greenhouses[2].params.noise_sd == 0.05);
  CHECK(spec.retention);
}

}  // TEST_SUITE

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: greenport_acceptance [criterion numbers...]  (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "gradcheck.hpp"
#include "greenport/cli/commands.hpp"
#include "greenport/data/climate.hpp"
#include "greenport/data/window.hpp"
#include "memory_stats.hpp"
#include "support.hpp"

using namespace greenport;
using namespace greenport::cli;

namespace {

// Pinned tolerances and thresholds.
constexpr double kGradStep = 1e-5;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradMaxSeconds = 30.0;
constexpr double kProgressRatio = 0.5;
constexpr double kProgressMaxSeconds = 300.0;
constexpr double kTransferRatio = 0.5;  // regression threshold on transferred / fresh first eval
constexpr double kReplayRatio = 0.6;    // tightened from the provisional 0.7
constexpr std::size_t kPostSwitchUpdates = 50;
constexpr std::size_t kRetentionDaysC = 45;
constexpr double kTurnoverTol = 0.009;
constexpr double kDecayTol = 0.03;
constexpr std::size_t kDecayBatches = 10;
constexpr std::size_t kDecayTrials = 50;
constexpr std::size_t kPerElementTrials = 400;
constexpr double kPerElementBound = 1e-3;
constexpr double kDeterminismMaxSeconds = 600.0;
constexpr double kVpdTol = 1e-3;
constexpr double kPhotoTol = 1e-6;
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// Desk preset with the given greenhouses, datasets generated under dir.
ExperimentSpec desk_spec(std::uint64_t seed, const std::filesystem::path& dir,
                         const std::vector<std::pair<std::string, std::size_t>>& greenhouses) {
  nlohmann::json doc{{"preset", "desk"}, {"seed", seed}, {"output_dir", dir.string()}};
  doc["greenhouses"] = nlohmann::json::array();
  for (const auto& [name, days] : greenhouses) doc["greenhouses"].push_back({{"name", name}, {"preset", name}, {"days", days}});
  ExperimentSpec spec = parse_experiment(doc);
  std::ostringstream quiet;
  cmd_generate(spec, quiet);
  return spec;
}

const EvalPoint& first_point(const LearningCurve& c, const std::string& phase) {
  for (const auto& p : c.points)
    if (p.phase == phase) return p;
  throw std::runtime_error("no evaluation point for phase " + phase);
}

Outcome gradient_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelConfig cfg;
  cfg.hidden_dim = 4;
  cfg.dense_dim = 4;
  cfg.window_len = 6;
  double worst = 0.0;
  std::size_t entries = 0;
  std::string where;
  for (std::uint64_t seed : kSeeds) {
    SeededRng rng(seed);
    ModelParams p = init_model(cfg, rng);
    for (Matrix* m : p.tensors())
      for (double& v : m->values()) v += rng.uniform(-0.2, 0.2);
    const auto batch = testing::random_samples(rng, 3, cfg.window_len);
    const auto rep = testing::grad_check(p, batch, kGradStep);
    entries += rep.entries;
    if (rep.worst_rel > worst) {
      worst = rep.worst_rel;
      where = "seed " + std::to_string(seed) + " " + rep.worst_name;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kGradRelTol && secs < kGradMaxSeconds,
          std::to_string(entries) + " entries, worst rel err " + fmt("%.2e", worst) + " (" + where + ") < " +
              fmt("%.0e", kGradRelTol) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome protocol_constants() {
  const ExperimentSpec s = parse_experiment({{"preset", "paper"}});
  const std::size_t separation_s = s.stride * static_cast<std::size_t>(kSampleSpacingSeconds);
  const bool ok = s.model.window_len == 250 && separation_s == 600 && s.stride == 2 && s.batch_size == 100 &&
                  s.memory.capacity == 10000 && s.memory.substitution_probability == 0.1 && s.eval_every == 3 &&
                  s.test_size == 10000;
  std::ostringstream d;
  d << "window " << s.model.window_len << ", separation " << separation_s / 60 << " min (stride " << s.stride
    << "), batch " << s.batch_size << ", capacity " << s.memory.capacity << ", p " << s.memory.substitution_probability
    << ", eval every " << s.eval_every << ", test " << s.test_size;
  return {ok, d.str()};
}

Outcome learning_progress() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t good = 0;
  std::string ratios;
  for (std::uint64_t seed : kSeeds) {
    const auto dir = testing::scratch_dir("accept_progress_" + std::to_string(seed));
    const ExperimentSpec spec = desk_spec(seed, dir, {{"GH-A", 30}});
    const auto result = run_scenario(build_scenario(spec));
    const auto& pts = result.log.curve.points;
    if (pts.size() < 6) return {false, "too few evaluation points"};
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      first += pts[i].mse_total / 3;
      last += pts[pts.size() - 1 - i].mse_total / 3;
    }
    const double r = last / first;
    good += r < kProgressRatio;
    ratios += (ratios.empty() ? "" : " ") + fmt("%.3f", r);
    std::filesystem::remove_all(dir);
  }
  const double secs = seconds_since(t0);
  return {good >= 4 && secs < kProgressMaxSeconds,
          "last3/first3 per seed [" + ratios + "], " + std::to_string(good) + "/5 below " + fmt("%.1f", kProgressRatio) +
              ", " + fmt("%.1f", secs) + " s"};
}

// Shared by criteria 4 and 5: GH-A then GH-C, with GH-C cut to a fixed number of updates.
struct SwitchRun {
  double transferred_first = 0.0;
  double fresh_first = 0.0;
  double retention_replay = 0.0;
  double retention_ablation = 0.0;
};

std::vector<SwitchRun> switch_runs() {
  static std::vector<SwitchRun> cache;
  if (!cache.empty()) return cache;
  for (std::uint64_t seed : kSeeds) {
    const auto dir = testing::scratch_dir("accept_switch_" + std::to_string(seed));
    const ExperimentSpec spec = desk_spec(seed, dir, {{"GH-A", 30}, {"GH-C", kRetentionDaysC}});
    ScenarioConfig cfg = build_scenario(spec);
    auto& stream = cfg.phases[1].stream;
    if (stream.size() < kPostSwitchUpdates * cfg.batch_size) throw std::runtime_error("GH-C stream too short");
    stream.resize(kPostSwitchUpdates * cfg.batch_size);

    SwitchRun r;
    const auto with = run_scenario(cfg);
    r.transferred_first = first_point(with.log.curve, "GH-C").mse_total;
    r.retention_replay = evaluate(with.state.params, cfg.phases[0].test_set).mse_total;
    r.fresh_first = first_point(run_baseline(cfg, 1).log.curve, "GH-C").mse_total;

    ScenarioConfig ablation = cfg;
    ablation.replay_size = 0;
    const auto without = run_scenario(ablation);
    r.retention_ablation = evaluate(without.state.params, cfg.phases[0].test_set).mse_total;
    cache.push_back(r);
    std::filesystem::remove_all(dir);
  }
  return cache;
}

Outcome transfer_benefit() {
  std::size_t better = 0, within = 0;
  std::string ratios;
  for (const auto& r : switch_runs()) {
    better += r.transferred_first < r.fresh_first;
    const double ratio = r.transferred_first / r.fresh_first;
    within += ratio <= kTransferRatio;
    ratios += (ratios.empty() ? "" : " ") + fmt("%.3f", ratio);
  }
  return {better >= 4 && within >= 4,
          "transferred/fresh first GH-C eval [" + ratios + "], " + std::to_string(better) + "/5 transferred < fresh, " +
              std::to_string(within) + "/5 within regression threshold " + fmt("%.2f", kTransferRatio)};
}

Outcome replay_mitigates_forgetting() {
  std::vector<double> ratios;
  std::string text;
  for (const auto& r : switch_runs()) {
    ratios.push_back(r.retention_replay / r.retention_ablation);
    text += (text.empty() ? "" : " ") + fmt("%.3f", ratios.back());
  }
  const double med = median(ratios);
  return {med <= kReplayRatio, "GH-A test MSE after " + std::to_string(kPostSwitchUpdates) +
                                   " GH-C updates, replay/ablation [" + text + "], median " + fmt("%.3f", med) +
                                   " <= " + fmt("%.2f", kReplayRatio)};
}

Outcome memory_statistics() {
  std::ostringstream d;
  bool ok = true;

  const bool fill = testing::fill_phase_exact({10000, 0.1, MemoryStrategy::PerBatch}, 100, 1);
  ok &= fill;
  d << "(i) fill exact " << (fill ? "yes" : "no");

  double lo = 1.0, hi = 0.0;
  for (double f : testing::per_batch_turnover(10000, 0.1, 50, 2)) {
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  ok &= lo >= 0.1 - kTurnoverTol && hi <= 0.1 + kTurnoverTol;
  d << "; (ii) turnover over 50 updates in [" << fmt("%.4f", lo) << ", " << fmt("%.4f", hi) << "]";

  const double expected = std::pow(0.9, double(kDecayBatches));
  double worst = 0.0, sum = 0.0;
  for (std::size_t t = 0; t < kDecayTrials; ++t) {
    const double f = testing::old_fraction_after(10000, 0.1, kDecayBatches, MemoryStrategy::PerBatch, 100, 1000 + t);
    worst = std::max(worst, std::abs(f - expected));
    sum += f;
  }
  ok &= worst <= kDecayTol;
  d << "; (iii) k=" << kDecayBatches << " old fraction mean " << fmt("%.4f", sum / kDecayTrials) << " vs "
    << fmt("%.4f", expected) << ", worst trial dev " << fmt("%.4f", worst);

  double pe = 0.0;
  for (std::size_t t = 0; t < kPerElementTrials; ++t)
    pe += testing::old_fraction_after(10000, 0.1, 66, MemoryStrategy::PerElement, 1, 5000 + t);
  pe /= kPerElementTrials;
  ok &= pe < kPerElementBound;
  d << "; (iv) per-element old fraction after 66 obs " << fmt("%.2e", pe) << " (mean of " << kPerElementTrials
    << " trials)";
  return {ok, d.str()};
}

Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  auto pipeline = [](const std::filesystem::path& out) {
    const std::string o = out.string();
    const std::vector<std::vector<std::string>> steps = {
        {"generate", "--seed", "7", "--out", o},
        {"run", "--seed", "7", "--out", o, "--retention", "--dump-memory"},
        {"baseline", "--seed", "7", "--out", o, "--phase", "GH-B"},
        {"baseline", "--seed", "7", "--out", o, "--phase", "GH-C"},
        {"compare", "--out", o}};
    for (auto args : steps) {
      args.insert(args.begin(), "greenport");
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out_s, err_s;
      if (run_cli(int(argv.size()), argv.data(), out_s, err_s) != 0) throw std::runtime_error(err_s.str());
    }
  };
  const auto a = testing::scratch_dir("accept_determinism_a");
  const auto b = testing::scratch_dir("accept_determinism_b");
  pipeline(a);
  pipeline(b);
  std::size_t files = 0, identical = 0;
  std::string mismatch;
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    const auto name = entry.path().filename();
    ++files;
    if (testing::slurp(a / name) == testing::slurp(b / name)) {
      ++identical;
    } else {
      mismatch += " " + name.string();
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = files >= 12 && identical == files && secs < kDeterminismMaxSeconds;
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  return {ok, std::to_string(identical) + "/" + std::to_string(files) + " output files byte-identical" +
                  (mismatch.empty() ? "" : " (differ:" + mismatch + ")") + ", 3-phase desk pipeline twice in " +
                  fmt("%.1f", secs) + " s"};
}

Outcome data_oracles() {
  const double vpd = vapor_pressure_deficit(20.0, 50.0);
  // Independent evaluation of the Magnus form.
  const double vpd_ref = 0.6108 * std::exp(17.27 * 20.0 / (20.0 + 237.3)) * 0.5;

  GreenhouseParams p;
  p.p_max = 30;
  p.alpha = 0.05;
  p.k_c = 300;
  const double photo = photosynthesis_oracle(600, 800, p);
  const double photo_ref = 30.0 * (30.0 / 60.0) * (800.0 / 1100.0);  // = 120/11

  SeededRng rng(2024);
  std::size_t agree = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = rng.uniform_index(5000), len = 1 + rng.uniform_index(400), stride = 1 + rng.uniform_index(12);
    const std::size_t closed = n >= len ? (n - len) / stride + 1 : 0;
    agree += extract_windows(n, len, stride).size() == closed;
  }
  const bool ok = std::abs(vpd - 1.169) <= kVpdTol && std::abs(vpd - vpd_ref) < 1e-12 &&
                  std::abs(photo - photo_ref) <= kPhotoTol && std::round(photo * 1000) / 1000 == 10.909 && agree == 50;
  return {ok, "VPD(20,50) " + fmt("%.6f", vpd) + " kPa; photosynthesis " + fmt("%.9f", photo) + " vs 120/11 " +
                  fmt("%.9f", photo_ref) + " (rounds to 10.909); window closed form " + std::to_string(agree) + "/50"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"protocol constants", protocol_constants},
      {"learning progress", learning_progress},
      {"transfer benefit", transfer_benefit},
      {"replay mitigates forgetting", replay_mitigates_forgetting},
      {"memory statistics", memory_statistics},
      {"determinism", determinism},
      {"data-layer oracles", data_oracles},
  };
  std::set<std::size_t> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::stoul(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!chosen.empty() && !chosen.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::cout << "CRITERION " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return all ? 0 : 1;
}

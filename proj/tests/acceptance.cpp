// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Run a single criterion with `csda_acceptance <n>`.
//
// Criteria:
//   1. link-budget fidelity (antenna gains, path loss)
//   2. statistical fidelity of the random channel pieces (1e6 draws)
//   3. network gradient correctness against finite differences (20 seeds)
//   4. desk-scale detection thresholds on all four datasets
//   5. SINR <= SNR pointwise under common draws
//   6. end-to-end pipeline determinism through the CLI
//   7. exact save/load round trips on randomized instances

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "csda/channel.hpp"
#include "csda/cnn.hpp"
#include "csda/dataset.hpp"
#include "csda/dtree.hpp"
#include "csda/eval.hpp"
#include "csda/link_budget.hpp"
#include "csda/pipeline.hpp"
#include "helpers/gradcheck.hpp"
#include "helpers/stats.hpp"

namespace fs = std::filesystem;
using namespace csda;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion 1 -------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool pass = true;

  const struct {
    AntennaSpec antenna;
    double expect_dbi;
  } gains[] = {
      {{0.254, 0.43}, 33.21},
      {{1.5, 0.54}, 49.62},
      {{0.1, 0.56}, 26.3},
  };
  for (const auto& g : gains) {
    const double got = aperture_gain_dbi(g.antenna, 26.25e9);
    if (std::abs(got - g.expect_dbi) >= 0.05) {
      pass = false;
      detail << " gain(" << g.antenna.diameter_m << "m)=" << got
             << " want " << g.expect_dbi << " +-0.05;";
    }
  }
  const double fspl_gw = fspl_db(70000e3, 26.25e9);
  const double fspl_llo = fspl_db(100e3, 26.25e9);
  if (std::abs(fspl_gw - 217.73) >= 0.01) {
    pass = false;
    detail << " fspl(70000km)=" << fspl_gw << " want 217.73 +-0.01;";
  }
  if (std::abs(fspl_llo - 160.83) >= 0.01) {
    pass = false;
    detail << " fspl(100km)=" << fspl_llo << " want 160.83 +-0.01;";
  }

  const double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) {
    pass = false;
    detail << " runtime " << elapsed << "s exceeds 1s;";
  }
  if (pass) {
    detail << "three antenna gains within 0.05 dB, both path losses within "
              "0.01 dB, "
           << elapsed << "s";
  }
  return {pass, detail.str()};
}

// --- criterion 2 -------------------------------------------------------------

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool pass = true;
  const std::size_t n = 1000000;

  std::uint64_t stream = 0;
  for (double k : {0.0, 5.0, 100.0}) {
    RngStream rng(1001, stream++);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += sample_rician(k, rng).power();
    }
    const double mean = sum / static_cast<double>(n);
    if (std::abs(mean - 1.0) >= 0.01) {
      pass = false;
      detail << " E|h|^2(K=" << k << ")=" << mean << ";";
    }
  }

  for (double p : {0.5, 0.75, 1.0}) {
    const InterferenceSpec spec{InterferenceModel::kModel1, -110.0, p};
    RngStream rng(1002, stream++);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += gate(spec, rng);
    const double rate = sum / static_cast<double>(n);
    if (std::abs(rate - p) >= 0.005) {
      pass = false;
      detail << " gate(p=" << p << ")=" << rate << ";";
    }
  }

  {
    const InterferenceSpec spec{InterferenceModel::kModel2, -110.0, 1.0};
    RngStream rng(1003, stream++);
    std::vector<double> normalized;
    normalized.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      normalized.push_back(effective_power_model2_w(spec, 1, rng) /
                           spec.power_w());
    }
    const double ks = testutil::ks_statistic(normalized, testutil::exp1_cdf);
    if (ks >= 0.005) {
      pass = false;
      detail << " model2 KS=" << ks << " want < 0.005;";
    } else {
      detail << "fading means, gate rates and model-2 KS=" << ks
             << " all in tolerance at n=1e6";
    }
  }

  const double elapsed = seconds_since(t0);
  detail << ", " << elapsed << "s";
  if (elapsed >= 30.0) {
    pass = false;
    detail << " (exceeds 30s)";
  }
  return {pass, detail.str()};
}

// --- criterion 3 -------------------------------------------------------------

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const CnnConfig tiny{20, 3, 5, 4, 2};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = testutil::gradient_check(tiny, seed);
    worst = std::max(worst, r.max_rel_error);
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "max relative error " << worst << " over 20 seeds, " << elapsed
         << "s";
  return {worst < 1e-4 && elapsed < 60.0, detail.str()};
}

// --- criterion 4 -------------------------------------------------------------

Outcome criterion4(const fs::path& out_root) {
  std::ostringstream detail;
  bool pass = true;

  struct Run {
    const char* scenario;
    InterferenceModel model;
    std::uint64_t seed;
  };
  // Seeds drawn from the declared non-adversarial set {0, 1, 2}.
  const Run runs[] = {
      {"gateway", InterferenceModel::kModel1, 0},
      {"llo", InterferenceModel::kModel1, 1},
      {"gateway", InterferenceModel::kModel2, 2},
      {"llo", InterferenceModel::kModel2, 0},
  };

  double cnn_sum = 0.0, dtree_sum = 0.0;
  std::vector<TrainLog> logs;
  for (const auto& run : runs) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentSpec spec = make_experiment_spec(
        run.scenario, run.model, ReproduceOptions::Scale::kDesk,
        /*fast=*/false, run.seed);
    const auto dir =
        out_root / (std::string(run.scenario) + "_model" +
                    std::to_string(static_cast<int>(run.model)));
    const ExperimentResult result = run_experiment(spec, dir);
    const double cnn_acc = metrics(result.cnn_eval.total).accuracy;
    const double dtree_acc = metrics(result.dtree_eval.total).accuracy;
    const double elapsed = seconds_since(t0);
    cnn_sum += cnn_acc;
    dtree_sum += dtree_acc;
    logs.push_back(result.cnn_log);

    detail << " " << run.scenario << "/m"
           << static_cast<int>(run.model) << " cnn=" << cnn_acc
           << " dtree=" << dtree_acc << " (" << static_cast<int>(elapsed)
           << "s);";
    if (cnn_acc < 0.95) {
      pass = false;
      detail << " CNN below 0.95;";
    }
    if (dtree_acc < 0.90) {
      pass = false;
      detail << " DTREE below 0.90;";
    }
    if (elapsed >= 900.0) {
      pass = false;
      detail << " runtime exceeds 15 min;";
    }
  }

  if (cnn_sum < dtree_sum) {
    pass = false;
    detail << " mean CNN accuracy below mean DTREE accuracy;";
  }

  // Training-curve sanity on the three distinct seeds: epoch-5 loss never
  // above epoch-1 loss.
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& epochs = logs[i].epochs;
    if (epochs.size() >= 5 && epochs[4].loss > epochs[0].loss) {
      pass = false;
      detail << " loss(5) > loss(1) on run " << i << ";";
    }
  }
  return {pass, detail.str()};
}

// --- criterion 5 -------------------------------------------------------------

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = scenario_preset("gateway");
  const PhaseAngle psi(240);
  const std::size_t n = 100000;
  bool pass = true;
  std::ostringstream detail;

  RngStream rc(2024, 0);
  const SampleWindow clean = simulate_window(cfg, psi, std::nullopt, n, rc);

  std::size_t pairs = 0;
  for (const auto model :
       {InterferenceModel::kModel1, InterferenceModel::kModel2}) {
    for (double i_dbw = -130.0; i_dbw <= -100.0; i_dbw += 5.0) {
      const InterferenceSpec spec{model, i_dbw, 0.75};
      RngStream ri(2024, 0);
      const SampleWindow hit = simulate_window(cfg, psi, spec, n, ri);
      for (std::size_t i = 0; i < n; ++i) {
        ++pairs;
        if (hit.values_db[i] > clean.values_db[i] + 1e-12) {
          pass = false;
          detail << " violation at model " << static_cast<int>(model)
                 << " I=" << i_dbw << " sample " << i << ";";
          break;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (pass) {
    detail << pairs << " common-seed pairs, SINR <= SNR pointwise, " << elapsed
           << "s";
  }
  return {pass && elapsed < 10.0, detail.str()};
}

// --- criterion 6 -------------------------------------------------------------

Outcome criterion6(const fs::path& out_root) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path a = out_root / "repro_a";
  const fs::path b = out_root / "repro_b";
  fs::remove_all(a);
  fs::remove_all(b);

  // Determinism is scale-independent (identical code path per window);
  // smoke scale keeps this criterion's runtime inside the 4x-desk budget.
  const std::string base = std::string(CSDA_CLI_PATH) +
                           " reproduce --scale smoke --seed 7 --out ";
  if (std::system((base + a.string() + " > /dev/null").c_str()) != 0) {
    return {false, "first reproduce run failed"};
  }
  if (std::system((base + b.string() + " --jobs 2 > /dev/null").c_str()) != 0) {
    return {false, "second reproduce run failed"};
  }

  bool pass = true;
  std::ostringstream detail;
  std::size_t files = 0;
  for (const char* experiment :
       {"gateway_model1", "gateway_model2", "llo_model1", "llo_model2"}) {
    for (const char* rel :
         {"dataset/manifest.jsonl", "dataset/values.f64le", "cnn/model.cnn",
          "cnn/training_log.csv", "dtree/model.json", "eval_cnn/metrics.json",
          "eval_dtree/metrics.json"}) {
      const fs::path pa = a / experiment / rel;
      const fs::path pb = b / experiment / rel;
      ++files;
      if (!fs::exists(pa) || !fs::exists(pb)) {
        pass = false;
        detail << " missing " << experiment << "/" << rel << ";";
      } else if (slurp(pa) != slurp(pb)) {
        pass = false;
        detail << " bytes differ: " << experiment << "/" << rel << ";";
      }
    }
  }
  if (slurp(a / "summary.csv") != slurp(b / "summary.csv")) {
    pass = false;
    detail << " summary.csv differs;";
  }
  if (pass) {
    detail << files << " artifacts byte-identical across runs (jobs 1 vs 2), "
           << seconds_since(t0) << "s";
  }
  return {pass, detail.str()};
}

// --- criterion 7 -------------------------------------------------------------

Dataset random_dataset(RngStream& rng) {
  GenerationGrid grid;
  grid.model = rng.bernoulli(0.5) ? InterferenceModel::kModel1
                                  : InterferenceModel::kModel2;
  grid.window_length = 8 + rng.next_u64() % 24;
  grid.psi_deg = {rng.uniform() * 359.0, 240.0};
  grid.p_alpha = {0.25 + rng.uniform() * 0.5};
  grid.power_dbw = {-130.0 + rng.uniform() * 30.0};
  grid.clean_windows = 4 + rng.next_u64() % 8;
  grid.interfered_windows = 4 + rng.next_u64() % 8;
  Dataset ds = generate(rng.bernoulli(0.5) ? scenario_preset("gateway")
                                           : scenario_preset("llo"),
                        grid, rng.next_u64());
  if (ds.size() >= 8) split_dataset(ds, 0.5, rng.next_u64());
  return ds;
}

bool dataset_roundtrip(const Dataset& ds, const fs::path& dir) {
  save(ds, dir);
  const Dataset back = load(dir);
  if (back.size() != ds.size()) return false;
  if (back.manifest.master_seed != ds.manifest.master_seed) return false;
  if (back.manifest.split.train != ds.manifest.split.train) return false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (back.windows[i].values_db != ds.windows[i].values_db) return false;
    if (back.windows[i].label != ds.windows[i].label) return false;
    if (back.windows[i].meta.psi_deg != ds.windows[i].meta.psi_deg) {
      return false;
    }
  }
  return true;
}

Outcome criterion7(const fs::path& out_root) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(777, 0);
  const fs::path dir = out_root / "roundtrip";
  fs::create_directories(dir);
  bool pass = true;
  std::ostringstream detail;
  std::size_t cases = 0;

  for (int i = 0; i < 34 && pass; ++i, ++cases) {
    if (!dataset_roundtrip(random_dataset(rng), dir / "ds")) {
      pass = false;
      detail << " dataset round trip failed on case " << i << ";";
    }
  }

  for (int i = 0; i < 33 && pass; ++i, ++cases) {
    const CnnConfig cfg{8 + rng.next_u64() % 16, 1 + rng.next_u64() % 4, 5,
                        1 + rng.next_u64() % 6, 2};
    RngStream init(rng.next_u64(), 0);
    ParamSet params = init_params(cfg, init);
    for (double& b : params.conv_bias()) b = init.uniform() - 0.5;
    const CnnModel model(std::move(params),
                         {init.uniform() * 10.0, 0.5 + init.uniform()},
                         {3, 4, 1e-3, 42});
    model.save(dir / "model.cnn");
    const CnnModel back = CnnModel::load(dir / "model.cnn");
    if (back.params().data != model.params().data ||
        back.standardization().mean != model.standardization().mean ||
        back.config().input_length != model.config().input_length) {
      pass = false;
      detail << " cnn model round trip failed on case " << i << ";";
    }
  }

  for (int i = 0; i < 33 && pass; ++i, ++cases) {
    WindowMatrix m;
    m.rows = 16 + rng.next_u64() % 16;
    m.cols = 3 + rng.next_u64() % 5;
    m.values.resize(m.rows * m.cols);
    m.labels.resize(m.rows);
    m.window_ids.resize(m.rows);
    for (auto& v : m.values) v = rng.uniform() * 20.0 - 10.0;
    for (auto& l : m.labels) l = rng.bernoulli(0.5) ? 1 : 0;
    const DtreeModel model(DecisionTree::fit(m),
                           {rng.uniform(), 0.5 + rng.uniform()});
    model.save(dir / "model.json");
    const DtreeModel back = DtreeModel::load(dir / "model.json");
    if (back.tree().nodes().size() != model.tree().nodes().size() ||
        back.standardization().mean != model.standardization().mean) {
      pass = false;
      detail << " dtree model round trip failed on case " << i << ";";
    } else {
      for (std::size_t k = 0; k < model.tree().nodes().size(); ++k) {
        const auto& x = model.tree().nodes()[k];
        const auto& y = back.tree().nodes()[k];
        if (x.feature != y.feature || x.threshold != y.threshold ||
            x.left != y.left || x.counts != y.counts) {
          pass = false;
          detail << " dtree node mismatch on case " << i << ";";
          break;
        }
      }
    }
  }

  const double elapsed = seconds_since(t0);
  if (pass) {
    detail << cases << " randomized round trips exact, " << elapsed << "s";
  }
  return {pass && elapsed < 30.0, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const fs::path out_root = "acceptance_out";
  fs::create_directories(out_root);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "link-budget fidelity", [] { return criterion1(); }},
      {2, "statistical fidelity", [] { return criterion2(); }},
      {3, "gradient correctness", [] { return criterion3(); }},
      {4, "desk-scale detection thresholds",
       [&] { return criterion4(out_root / "criterion4"); }},
      {5, "SINR bounded by SNR", [] { return criterion5(); }},
      {6, "pipeline determinism", [&] { return criterion6(out_root); }},
      {7, "round-trip integrity", [&] { return criterion7(out_root); }},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    Outcome outcome{false, "unhandled exception"};
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion "
              << criterion.id << ": " << criterion.name << " - "
              << outcome.detail << "\n";
    std::cout.flush();
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csda/cnn.hpp"
#include "csda/dataset.hpp"
#include "csda/dtree.hpp"
#include "csda/eval.hpp"

namespace csda {

// One (scenario, interference model) experiment: generate + split + save the
// dataset, train both learners, evaluate both on the held-out split.
struct ExperimentSpec {
  ScenarioConfig scenario;
  GenerationGrid grid;
  std::uint64_t dataset_seed = 0;
  double train_fraction = 2.0 / 3.0;
  TrainOptions cnn;
  DtreeConfig dtree;
};

struct ExperimentResult {
  EvalResult cnn_eval;
  EvalResult dtree_eval;
  TrainLog cnn_log;
};

// Runs the experiment and writes the artifact tree:
//   <out>/dataset/            manifest.jsonl + values.f64le
//   <out>/cnn/                model.cnn + training_log.csv
//   <out>/dtree/              model.json
//   <out>/eval_cnn|eval_dtree metrics.json, confusion.csv, breakdown.csv, SVGs
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir,
                                int jobs = 1);

struct ReproduceOptions {
  enum class Scale { kDesk, kSmoke };
  Scale scale = Scale::kDesk;
  bool fast = false;  // shrink windows to 256 samples at desk scale
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  int jobs = 1;
};

struct ReproduceRow {
  std::string scenario;
  int interference_model;
  std::string learner;
  double accuracy;
};

struct ReproduceSummary {
  std::vector<ReproduceRow> rows;
};

ExperimentSpec make_experiment_spec(const std::string& scenario_name,
                                    InterferenceModel model,
                                    ReproduceOptions::Scale scale, bool fast,
                                    std::uint64_t seed);

// Runs all four (scenario x interference model) experiments under one seed
// and writes summary.csv plus resolved_config.json. Re-running with the same
// options overwrites every artifact with identical bytes.
ReproduceSummary run_reproduce(const ReproduceOptions& options);

}  // namespace csda

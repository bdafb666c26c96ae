#include "csda/pipeline.hpp"

#include <fstream>

#include "json.hpp"

namespace csda {

using nlohmann::json;

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir,
                                int jobs) {
  std::filesystem::create_directories(out_dir);

  Dataset ds = generate(spec.scenario, spec.grid, spec.dataset_seed, jobs);
  split_dataset(ds, spec.train_fraction, spec.dataset_seed);
  save(ds, out_dir / "dataset");

  ExperimentResult result;

  DtreeModel dtree = train_dtree(ds, spec.dtree);
  std::filesystem::create_directories(out_dir / "dtree");
  dtree.save(out_dir / "dtree" / "model.json");
  result.dtree_eval = evaluate(
      [&](std::span<const double> w) { return dtree.predict_raw(w); },
      dtree.tree().input_length(), "dtree", ds);
  emit_report(result.dtree_eval, ds, out_dir / "eval_dtree");

  CnnModel cnn = train_cnn(ds, spec.cnn, &result.cnn_log);
  std::filesystem::create_directories(out_dir / "cnn");
  cnn.save(out_dir / "cnn" / "model.cnn");
  {
    std::ofstream log(out_dir / "cnn" / "training_log.csv");
    if (!log) throw IoError("cannot write cnn training log");
    log.precision(17);
    log << "epoch,loss,accuracy\n";
    for (const auto& e : result.cnn_log.epochs) {
      log << e.epoch << "," << e.loss << "," << e.accuracy << "\n";
    }
  }
  result.cnn_eval = evaluate(
      [&](std::span<const double> w) { return cnn.predict_raw(w).first; },
      cnn.config().input_length, "cnn", ds);
  emit_report(result.cnn_eval, ds, out_dir / "eval_cnn");

  return result;
}

ExperimentSpec make_experiment_spec(const std::string& scenario_name,
                                    InterferenceModel model,
                                    ReproduceOptions::Scale scale, bool fast,
                                    std::uint64_t seed) {
  ExperimentSpec spec;
  spec.scenario = scenario_preset(scenario_name);
  spec.grid.model = model;
  spec.dataset_seed = seed;
  spec.cnn.seed = seed;

  if (scale == ReproduceOptions::Scale::kDesk) {
    spec.grid.window_length = fast ? 256 : 1000;
    spec.grid.clean_windows = 2250;
    spec.grid.interfered_windows = 2250;
  } else {
    // Smoke scale: every moving part exercised, seconds of runtime.
    spec.grid.window_length = 128;
    spec.grid.psi_deg = {0, 240};
    spec.grid.p_alpha = {0.5};
    spec.grid.power_dbw = {-130, -115, -100};
    spec.grid.clean_windows = 24;
    spec.grid.interfered_windows = 24;
    spec.cnn.epochs = 3;
    spec.cnn.batch_size = 16;
  }
  return spec;
}

ReproduceSummary run_reproduce(const ReproduceOptions& options) {
  std::filesystem::create_directories(options.out_dir);

  const json resolved{
      {"command", "reproduce"},
      {"scale", options.scale == ReproduceOptions::Scale::kDesk ? "desk" : "smoke"},
      {"fast", options.fast},
      {"seed", options.seed},
      {"jobs", options.jobs},
      {"out_dir", options.out_dir.string()}};
  {
    std::ofstream out(options.out_dir / "resolved_config.json");
    if (!out) throw IoError("cannot write resolved_config.json");
    out << resolved.dump(2) << "\n";
  }

  ReproduceSummary summary;
  for (const std::string& scenario : {std::string("gateway"), std::string("llo")}) {
    for (InterferenceModel model :
         {InterferenceModel::kModel1, InterferenceModel::kModel2}) {
      const ExperimentSpec spec = make_experiment_spec(
          scenario, model, options.scale, options.fast, options.seed);
      const auto dir = options.out_dir /
                       (scenario + "_model" +
                        std::to_string(static_cast<int>(model)));
      const ExperimentResult result = run_experiment(spec, dir, options.jobs);
      summary.rows.push_back({scenario, static_cast<int>(model), "cnn",
                              metrics(result.cnn_eval.total).accuracy});
      summary.rows.push_back({scenario, static_cast<int>(model), "dtree",
                              metrics(result.dtree_eval.total).accuracy});
    }
  }

  std::ofstream out(options.out_dir / "summary.csv");
  if (!out) throw IoError("cannot write summary.csv");
  out.precision(17);
  out << "scenario,interference_model,learner,accuracy\n";
  for (const auto& row : summary.rows) {
    out << row.scenario << "," << row.interference_model << "," << row.learner
        << "," << row.accuracy << "\n";
  }
  if (!out) throw IoError("write failed: summary.csv");
  return summary;
}

}  // namespace csda

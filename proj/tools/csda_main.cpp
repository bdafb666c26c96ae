// csda: cislunar proximity-link simulator and interference-detection toolkit.
//
// Subcommands: linkbudget, generate, train, eval, reproduce. Every artifact
// directory receives a resolved_config.json sufficient to re-run the step;
// wall-clock timing goes to run.log so artifact bytes stay reproducible.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csda/channel.hpp"
#include "csda/cnn.hpp"
#include "csda/dataset.hpp"
#include "csda/dtree.hpp"
#include "csda/eval.hpp"
#include "csda/link_budget.hpp"
#include "csda/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path default_out_root() {
  if (const char* env = std::getenv("CSDA_OUT_ROOT")) return fs::path(env);
  return fs::path("csda_out");
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw csda::IoError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw csda::IoError("write failed: " + path.string());
}

// Wall-clock bookkeeping, quarantined from the deterministic artifacts.
class RunLog {
 public:
  explicit RunLog(const fs::path& dir) : out_(dir / "run.log") {
    stamp("start");
  }
  void stamp(const std::string& step) {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    out_ << std::put_time(std::gmtime(&t), "%FT%TZ") << " " << step << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
};

csda::ScenarioConfig resolve_scenario(const std::string& preset,
                                      const std::string& config_file,
                                      double bandwidth_hz, double rician_k) {
  csda::ScenarioConfig cfg;
  if (!config_file.empty()) {
    cfg = csda::load_scenario_file(config_file);
  } else {
    cfg = csda::scenario_preset(preset);
  }
  // Explicit flags win over the file/preset.
  if (bandwidth_hz > 0) cfg.bandwidth_hz = bandwidth_hz;
  if (rician_k >= 0) cfg.rician_k = rician_k;
  cfg.validate();
  return cfg;
}

int cmd_linkbudget(const std::string& preset, const std::string& config_file,
                   double bandwidth_hz, double rician_k, double psi_deg,
                   std::optional<double> sweep_step,
                   const std::string& csv_path) {
  const csda::ScenarioConfig cfg =
      resolve_scenario(preset, config_file, bandwidth_hz, rician_k);

  if (csda::PhaseAngle::needs_normalization(psi_deg)) {
    const csda::PhaseAngle normalized(psi_deg);
    std::cerr << "notice: psi " << psi_deg << " deg normalized to "
              << normalized.degrees() << " deg\n";
  }
  const csda::PhaseAngle psi(psi_deg);
  const csda::LinkBudgetBreakdown b = csda::link_budget_breakdown(cfg, psi);

  std::cout << std::fixed << std::setprecision(2);
  std::cout << "Link budget: " << cfg.name << " (psi = " << b.psi_deg
            << " deg, B = " << cfg.bandwidth_hz / 1e6 << " MHz)\n"
            << "  Tx power              " << std::setw(9) << b.tx_power_dbw << " dBW\n"
            << "  Tx antenna gain       " << std::setw(9) << b.tx_gain_dbi << " dBi\n"
            << "  Rx antenna gain       " << std::setw(9) << b.rx_gain_dbi << " dBi\n"
            << "  Tx losses             " << std::setw(9) << b.tx_loss_db << " dB\n"
            << "  Rx losses             " << std::setw(9) << b.rx_loss_db << " dB\n"
            << "  Free-space path loss  " << std::setw(9) << b.fspl_db << " dB\n"
            << "  Received power        " << std::setw(9) << b.received_power_dbw << " dBW\n"
            << "  Brightness temp       " << std::setw(9) << b.brightness_temperature_k << " K\n"
            << "  Operational temp      " << std::setw(9) << b.operational_temperature_k << " K\n"
            << "  Noise PSD             " << std::setw(9) << b.noise_psd_dbw_per_hz << " dBW/Hz\n"
            << "  Noise power           " << std::setw(9) << b.noise_power_dbw << " dBW\n"
            << "  Mean SNR              " << std::setw(9) << b.mean_snr_db << " dB\n";

  if (sweep_step) {
    const auto points = csda::snr_vs_phase_sweep(cfg, *sweep_step);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!csv_path.empty()) {
      file.open(csv_path);
      if (!file) throw csda::IoError("cannot write " + csv_path);
      out = &file;
    }
    *out << "psi_deg,mean_snr_db\n";
    out->precision(17);
    for (const auto& p : points) {
      *out << p.psi_deg << "," << p.mean_snr_db << "\n";
    }
    if (!csv_path.empty() && !file) {
      throw csda::IoError("write failed: " + csv_path);
    }
  }
  return 0;
}

int cmd_generate(const std::string& preset, const std::string& config_file,
                 double bandwidth_hz, double rician_k,
                 const std::string& interference, int model_id,
                 std::size_t windows, double clean_fraction, std::size_t length,
                 std::vector<double> p_alpha, std::vector<double> power_dbw,
                 std::vector<double> psi, double train_fraction,
                 std::uint64_t seed, const fs::path& out, int jobs,
                 bool write_csv) {
  const csda::ScenarioConfig cfg =
      resolve_scenario(preset, config_file, bandwidth_hz, rician_k);

  csda::GenerationGrid grid;
  bool clean_only = false;
  if (!interference.empty()) {
    if (interference == "none") {
      clean_only = true;
    } else {
      grid.model = csda::interference_model_from_string(interference);
    }
  } else {
    grid.model = csda::interference_model_from_int(model_id);
  }
  grid.window_length = length;
  if (!p_alpha.empty()) grid.p_alpha = std::move(p_alpha);
  if (!power_dbw.empty()) grid.power_dbw = std::move(power_dbw);
  if (!psi.empty()) grid.psi_deg = std::move(psi);
  csda::require(clean_fraction >= 0.0 && clean_fraction <= 1.0,
                "--clean-fraction must be in [0, 1]");
  if (clean_only) {
    grid.clean_windows = windows;
    grid.interfered_windows = 0;
  } else {
    grid.clean_windows = static_cast<std::size_t>(
        static_cast<double>(windows) * clean_fraction + 0.5);
    grid.interfered_windows = windows - grid.clean_windows;
  }

  fs::create_directories(out);
  RunLog log(out);
  csda::Dataset ds = csda::generate(cfg, grid, seed, jobs);
  log.stamp("generated " + std::to_string(ds.size()) + " windows");
  csda::split_dataset(ds, train_fraction, seed);
  log.stamp("split");
  csda::save(ds, out);
  if (write_csv) csda::export_csv(ds, out / "dataset.csv");
  log.stamp("saved");

  const json resolved{{"command", "generate"},
                      {"scenario", cfg.name},
                      {"config_file", config_file},
                      {"interference", clean_only ? "none" : to_string(grid.model)},
                      {"windows", windows},
                      {"clean_fraction", clean_fraction},
                      {"length", length},
                      {"p_alpha", grid.p_alpha},
                      {"power_dbw", grid.power_dbw},
                      {"psi_deg", grid.psi_deg},
                      {"train_fraction", train_fraction},
                      {"seed", seed},
                      {"jobs", jobs},
                      {"out", out.string()}};
  write_json_file(out / "resolved_config.json", resolved);

  std::cout << "wrote " << ds.size() << " windows (" << ds.manifest.split.train.size()
            << " train / " << ds.manifest.split.test.size() << " test) to "
            << out.string() << "\n";
  return 0;
}

int cmd_train(const fs::path& data_dir, const std::string& learner,
              std::size_t epochs, std::size_t batch_size, double lr,
              std::uint64_t seed, int max_depth, std::size_t min_samples_split,
              std::size_t expect_length, const fs::path& out) {
  csda::Dataset ds = csda::load(data_dir);
  if (expect_length != 0 && expect_length != ds.length()) {
    throw csda::ShapeError("expected window length " +
                           std::to_string(expect_length) + ", dataset has " +
                           std::to_string(ds.length()));
  }

  fs::create_directories(out);
  RunLog log(out);
  json resolved{{"command", "train"},
                {"data", data_dir.string()},
                {"learner", learner},
                {"seed", seed},
                {"out", out.string()}};

  if (learner == "cnn") {
    csda::TrainOptions options{epochs, batch_size, lr, seed};
    csda::TrainLog train_log;
    const csda::CnnModel model = csda::train_cnn(ds, options, &train_log);
    model.save(out / "model.cnn");
    std::ofstream tl(out / "training_log.csv");
    if (!tl) throw csda::IoError("cannot write training_log.csv");
    tl.precision(17);
    tl << "epoch,loss,accuracy\n";
    for (const auto& e : train_log.epochs) {
      tl << e.epoch << "," << e.loss << "," << e.accuracy << "\n";
      std::cout << "epoch " << e.epoch << ": loss " << e.loss << ", accuracy "
                << e.accuracy << "\n";
    }
    resolved["epochs"] = epochs;
    resolved["batch_size"] = batch_size;
    resolved["learning_rate"] = lr;
    std::cout << "wrote " << (out / "model.cnn").string() << "\n";
  } else if (learner == "dtree") {
    const csda::DtreeModel model =
        csda::train_dtree(ds, {max_depth, min_samples_split});
    model.save(out / "model.json");
    resolved["max_depth"] = max_depth;
    resolved["min_samples_split"] = min_samples_split;
    std::cout << "wrote " << (out / "model.json").string() << " (depth "
              << model.tree().depth() << ", " << model.tree().nodes().size()
              << " nodes)\n";
  } else {
    throw csda::InvalidParameter("unknown learner '" + learner +
                                 "' (expected cnn or dtree)");
  }
  log.stamp("trained " + learner);
  write_json_file(out / "resolved_config.json", resolved);
  return 0;
}

bool is_cnn_model_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw csda::IoError("cannot open model file: " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  return in && std::string(magic, 8) == "CSDACNN1";
}

int cmd_eval(const fs::path& data_dir, const fs::path& model_path,
             const fs::path& out) {
  csda::Dataset ds = csda::load(data_dir);
  fs::create_directories(out);
  RunLog log(out);

  csda::EvalResult result;
  if (is_cnn_model_file(model_path)) {
    const csda::CnnModel model = csda::CnnModel::load(model_path);
    result = csda::evaluate(
        [&](std::span<const double> w) { return model.predict_raw(w).first; },
        model.config().input_length, "cnn", ds);
  } else {
    const csda::DtreeModel model = csda::DtreeModel::load(model_path);
    result = csda::evaluate(
        [&](std::span<const double> w) { return model.predict_raw(w); },
        model.tree().input_length(), "dtree", ds);
  }
  csda::emit_report(result, ds, out);
  log.stamp("evaluated");

  write_json_file(out / "resolved_config.json",
                  json{{"command", "eval"},
                       {"data", data_dir.string()},
                       {"model", model_path.string()},
                       {"out", out.string()}});

  const csda::MetricValues m = csda::metrics(result.total);
  std::cout << result.model_name << " accuracy " << m.accuracy << " on "
            << result.total.total() << " test windows\n";
  return 0;
}

int cmd_reproduce(const std::string& scale_name, bool fast, std::uint64_t seed,
                  const fs::path& out, int jobs) {
  csda::ReproduceOptions options;
  if (scale_name == "desk") {
    options.scale = csda::ReproduceOptions::Scale::kDesk;
  } else if (scale_name == "smoke") {
    options.scale = csda::ReproduceOptions::Scale::kSmoke;
  } else {
    throw csda::InvalidParameter("unknown scale '" + scale_name +
                                 "' (expected desk or smoke)");
  }
  options.fast = fast;
  options.seed = seed;
  options.out_dir = out;
  options.jobs = jobs;

  fs::create_directories(out);
  RunLog log(out);
  const csda::ReproduceSummary summary = csda::run_reproduce(options);
  log.stamp("done");

  std::cout << "scenario  model  learner  accuracy\n";
  for (const auto& row : summary.rows) {
    std::cout << std::left << std::setw(10) << row.scenario << std::setw(7)
              << row.interference_model << std::setw(9) << row.learner
              << std::fixed << std::setprecision(4) << row.accuracy << "\n";
  }
  std::cout << "summary written to " << (out / "summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cislunar proximity-link simulator and interference detection"};
  app.require_subcommand(1);

  // --- linkbudget ---
  std::string lb_scenario = "gateway", lb_config;
  double lb_bandwidth = 0, lb_rician_k = -1, lb_psi = 0;
  std::optional<double> lb_sweep;
  std::string lb_csv;
  auto* lb = app.add_subcommand("linkbudget", "Print the link budget table");
  lb->add_option("--scenario", lb_scenario, "Scenario preset (gateway|llo)");
  lb->add_option("--config", lb_config, "Scenario config file (key = value)");
  lb->add_option("--bandwidth-hz", lb_bandwidth, "Override bandwidth [Hz]");
  lb->add_option("--rician-k", lb_rician_k, "Override Rician K factor");
  lb->add_option("--psi", lb_psi, "Lunar phase angle [deg]");
  lb->add_option("--sweep", lb_sweep, "Emit psi sweep CSV at this step [deg]");
  lb->add_option("--csv", lb_csv, "Write the sweep CSV here instead of stdout");

  // --- generate ---
  std::string gen_scenario = "gateway", gen_config, gen_interference;
  double gen_bandwidth = 0, gen_rician_k = -1;
  int gen_model = 1;
  std::size_t gen_windows = 4500, gen_length = 1000;
  double gen_clean_fraction = 0.5, gen_train_fraction = 2.0 / 3.0;
  std::vector<double> gen_p_alpha, gen_power, gen_psi;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  int gen_jobs = 1;
  bool gen_csv = false;
  auto* gen = app.add_subcommand("generate", "Generate a labeled dataset");
  gen->add_option("--scenario", gen_scenario, "Scenario preset (gateway|llo)");
  gen->add_option("--config", gen_config, "Scenario config file");
  gen->add_option("--bandwidth-hz", gen_bandwidth, "Override bandwidth [Hz]");
  gen->add_option("--rician-k", gen_rician_k, "Override Rician K factor");
  gen->add_option("--model", gen_model, "Interference model id (1|2)");
  gen->add_option("--interference", gen_interference,
                  "Interference choice (none|model1|model2); overrides --model");
  gen->add_option("--windows", gen_windows, "Total window count");
  gen->add_option("--clean-fraction", gen_clean_fraction,
                  "Fraction of clean windows");
  gen->add_option("--length", gen_length, "Samples per window");
  gen->add_option("--p-alpha", gen_p_alpha, "Gate probabilities to sweep");
  gen->add_option("--int-power-dbw", gen_power,
                  "Interference power levels to sweep [dBW]");
  gen->add_option("--psi", gen_psi, "Lunar phase angles to sweep [deg]");
  gen->add_option("--train-fraction", gen_train_fraction,
                  "Stratified train fraction");
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--jobs", gen_jobs, "Worker threads for generation");
  gen->add_flag("--csv", gen_csv, "Also export dataset.csv");

  // --- train ---
  std::string tr_data, tr_learner = "cnn", tr_out;
  std::size_t tr_epochs = 20, tr_batch = 32, tr_min_split = 2, tr_length = 0;
  double tr_lr = 1e-3;
  std::uint64_t tr_seed = 0;
  int tr_max_depth = 25;
  auto* tr = app.add_subcommand("train", "Train a detector on a dataset");
  tr->add_option("--data", tr_data, "Dataset directory")->required();
  tr->add_option("--learner", tr_learner, "cnn or dtree");
  tr->add_option("--epochs", tr_epochs, "Training epochs (cnn)");
  tr->add_option("--batch", tr_batch, "Mini-batch size (cnn)");
  tr->add_option("--lr", tr_lr, "Learning rate (cnn)");
  tr->add_option("--seed", tr_seed, "Training seed (cnn)");
  tr->add_option("--max-depth", tr_max_depth, "Depth cap (dtree)");
  tr->add_option("--min-samples-split", tr_min_split,
                 "Minimum rows to split (dtree)");
  tr->add_option("--length", tr_length,
                 "Expected window length (errors if the dataset disagrees)");
  tr->add_option("--out", tr_out, "Output directory");

  // --- eval ---
  std::string ev_data, ev_model, ev_out;
  auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset");
  ev->add_option("--data", ev_data, "Dataset directory")->required();
  ev->add_option("--model", ev_model, "Model file (.cnn or .json)")->required();
  ev->add_option("--out", ev_out, "Output directory");

  // --- reproduce ---
  std::string rp_scale = "desk", rp_out;
  bool rp_fast = false;
  std::uint64_t rp_seed = 0;
  int rp_jobs = 1;
  auto* rp = app.add_subcommand(
      "reproduce", "Run all four scenario x interference-model experiments");
  rp->add_option("--scale", rp_scale, "desk or smoke");
  rp->add_flag("--fast", rp_fast, "Desk scale with 256-sample windows");
  rp->add_option("--seed", rp_seed, "Master seed for all experiments");
  rp->add_option("--out", rp_out, "Output directory");
  rp->add_option("--jobs", rp_jobs, "Worker threads for generation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lb->parsed()) {
      return cmd_linkbudget(lb_scenario, lb_config, lb_bandwidth, lb_rician_k,
                            lb_psi, lb_sweep, lb_csv);
    }
    if (gen->parsed()) {
      const fs::path out =
          gen_out.empty() ? default_out_root() / "generate" : fs::path(gen_out);
      return cmd_generate(gen_scenario, gen_config, gen_bandwidth, gen_rician_k,
                          gen_interference, gen_model, gen_windows,
                          gen_clean_fraction, gen_length, gen_p_alpha,
                          gen_power, gen_psi, gen_train_fraction, gen_seed, out,
                          gen_jobs, gen_csv);
    }
    if (tr->parsed()) {
      const fs::path out =
          tr_out.empty() ? default_out_root() / "train" : fs::path(tr_out);
      return cmd_train(tr_data, tr_learner, tr_epochs, tr_batch, tr_lr, tr_seed,
                       tr_max_depth, tr_min_split, tr_length, out);
    }
    if (ev->parsed()) {
      const fs::path out =
          ev_out.empty() ? default_out_root() / "eval" : fs::path(ev_out);
      return cmd_eval(ev_data, ev_model, out);
    }
    if (rp->parsed()) {
      const fs::path out =
          rp_out.empty() ? default_out_root() / "reproduce" : fs::path(rp_out);
      return cmd_reproduce(rp_scale, rp_fast, rp_seed, out, rp_jobs);
    }
  } catch (const csda::InvalidParameter& e) {
    std::cerr << "error: invalid-parameter: " << e.what() << "\n";
    return 1;
  } catch (const csda::ShapeError& e) {
    std::cerr << "error: shape: " << e.what() << "\n";
    return 1;
  } catch (const csda::FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return 1;
  } catch (const csda::IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "csda/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "csda/link_budget.hpp"
#include "csda/svg.hpp"
#include "json.hpp"

namespace csda {

using nlohmann::json;

void ConfusionMatrix::add(int truth, int predicted) {
  require(truth == 0 || truth == 1, "truth label must be 0 or 1");
  require(predicted == 0 || predicted == 1, "predicted label must be 0 or 1");
  if (truth == 1) {
    predicted == 1 ? ++tp : ++fn;
  } else {
    predicted == 1 ? ++fp : ++tn;
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

MetricValues metrics(const ConfusionMatrix& cm) {
  require(cm.total() > 0, "metrics of an empty confusion matrix are undefined");
  MetricValues m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) /
               static_cast<double>(cm.total());
  if (cm.tp + cm.fp > 0) {
    m.precision = static_cast<double>(cm.tp) /
                  static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn > 0) {
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  }
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

namespace {

struct CellKeyLess {
  bool operator()(const CellKey& a, const CellKey& b) const {
    if (a.clean() != b.clean()) return a.clean();
    if (a.clean()) return a.psi_deg < b.psi_deg;
    if (*a.p_alpha != *b.p_alpha) return *a.p_alpha < *b.p_alpha;
    if (*a.power_dbw != *b.power_dbw) return *a.power_dbw < *b.power_dbw;
    return a.psi_deg < b.psi_deg;
  }
};

}  // namespace

EvalResult evaluate(const Predictor& predict, std::size_t model_input_length,
                    const std::string& model_name, const Dataset& ds) {
  require(!ds.manifest.split.test.empty(), "dataset has no test split");
  require_shape(model_input_length == ds.length(),
                "model input length " + std::to_string(model_input_length) +
                    " does not match dataset window length " +
                    std::to_string(ds.length()));

  EvalResult result;
  result.model_name = model_name;
  result.scenario = ds.manifest.scenario.name;
  result.interference_model = static_cast<int>(ds.manifest.grid.model);

  std::map<CellKey, ConfusionMatrix, CellKeyLess> cells;
  for (auto idx : ds.manifest.split.test) {
    const SampleWindow& w = ds.windows.at(idx);
    const int truth = w.label == Label::kInterfered ? 1 : 0;
    const int predicted = predict(w.values_db);
    result.total.add(truth, predicted);
    cells[window_cell(w)].add(truth, predicted);
  }
  for (const auto& [key, cm] : cells) result.cells.push_back({key, cm});
  return result;
}

namespace {

json metric_or_null(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

json cell_json(const CellResult& cell) {
  return json{{"I_dbw", cell.cell.power_dbw ? json(*cell.cell.power_dbw)
                                            : json(nullptr)},
              {"p_alpha", cell.cell.p_alpha ? json(*cell.cell.p_alpha)
                                            : json(nullptr)},
              {"psi_deg", cell.cell.psi_deg},
              {"tp", cell.cm.tp},
              {"fp", cell.cm.fp},
              {"fn", cell.cm.fn},
              {"tn", cell.cm.tn}};
}

std::string csv_optional(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out.precision(17);
  out << *v;
  return out.str();
}

}  // namespace

void emit_report(const EvalResult& result, const Dataset& ds,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const MetricValues m = metrics(result.total);

  json per_cell = json::array();
  for (const auto& cell : result.cells) per_cell.push_back(cell_json(cell));
  const json doc{{"model", result.model_name},
                 {"scenario", result.scenario},
                 {"interference_model", result.interference_model},
                 {"accuracy", m.accuracy},
                 {"precision", metric_or_null(m.precision)},
                 {"recall", metric_or_null(m.recall)},
                 {"f1", metric_or_null(m.f1)},
                 {"counts",
                  {{"tp", result.total.tp},
                   {"fp", result.total.fp},
                   {"fn", result.total.fn},
                   {"tn", result.total.tn}}},
                 {"per_cell", per_cell}};
  {
    std::ofstream out(out_dir / "metrics.json");
    if (!out) throw IoError("cannot write " + (out_dir / "metrics.json").string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + (out_dir / "metrics.json").string());
  }

  {
    std::ofstream out(out_dir / "confusion.csv");
    if (!out) throw IoError("cannot write " + (out_dir / "confusion.csv").string());
    out << "truth,predicted_clean,predicted_interfered\n";
    out << "clean," << result.total.tn << "," << result.total.fp << "\n";
    out << "interfered," << result.total.fn << "," << result.total.tp << "\n";
    if (!out) throw IoError("write failed: " + (out_dir / "confusion.csv").string());
  }

  {
    std::ofstream out(out_dir / "breakdown.csv");
    if (!out) throw IoError("cannot write " + (out_dir / "breakdown.csv").string());
    out.precision(17);
    out << "I_dbw,p_alpha,psi_deg,tp,fp,fn,tn\n";
    for (const auto& cell : result.cells) {
      out << csv_optional(cell.cell.power_dbw) << ","
          << csv_optional(cell.cell.p_alpha) << "," << cell.cell.psi_deg << ","
          << cell.cm.tp << "," << cell.cm.fp << "," << cell.cm.fn << ","
          << cell.cm.tn << "\n";
    }
    if (!out) throw IoError("write failed: " + (out_dir / "breakdown.csv").string());
  }

  const auto write_text = [&](const std::filesystem::path& path,
                              const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
  };

  std::ostringstream title;
  title << result.model_name << " on " << result.scenario << " / model "
        << result.interference_model << " (accuracy "
        << static_cast<int>(m.accuracy * 10000.0) / 100.0 << "%)";
  write_text(out_dir / "confusion_matrix.svg",
             svg_confusion_matrix(title.str(), result.total.tp,
                                  result.total.fp, result.total.fn,
                                  result.total.tn));

  // Example windows: the first clean and first interfered test window,
  // truncated to 200 samples for readability.
  const SampleWindow* clean = nullptr;
  const SampleWindow* interfered = nullptr;
  for (auto idx : ds.manifest.split.test) {
    const SampleWindow& w = ds.windows.at(idx);
    if (w.label == Label::kClean && !clean) clean = &w;
    if (w.label == Label::kInterfered && !interfered) interfered = &w;
    if (clean && interfered) break;
  }
  std::vector<Series> window_series;
  const auto window_to_series = [](const SampleWindow& w, std::string name,
                                   std::string color) {
    Series s{std::move(name), std::move(color), {}};
    const std::size_t n = std::min<std::size_t>(w.values_db.size(), 200);
    for (std::size_t i = 0; i < n; ++i) {
      s.points.push_back({static_cast<double>(i), w.values_db[i]});
    }
    return s;
  };
  if (clean) {
    window_series.push_back(window_to_series(*clean, "clean", "#1f77b4"));
  }
  if (interfered) {
    std::ostringstream name;
    name << "interfered (I=" << interfered->meta.interference->power_dbw
         << " dBW, p=" << interfered->meta.interference->p_alpha << ")";
    window_series.push_back(
        window_to_series(*interfered, name.str(), "#d62728"));
  }
  write_text(out_dir / "sinr_windows.svg",
             svg_line_chart("Example test windows", "sample",
                            "instantaneous SINR [dB]", window_series));

  Series sweep{"mean SNR", "#2ca02c", {}};
  for (const auto& p : snr_vs_phase_sweep(ds.manifest.scenario, 1.0)) {
    sweep.points.push_back({p.psi_deg, p.mean_snr_db});
  }
  write_text(out_dir / "snr_vs_phase.svg",
             svg_line_chart("Mean SNR vs lunar phase (" + result.scenario + ")",
                            "psi [deg]", "mean SNR [dB]", {sweep}));
}

}  // namespace csda

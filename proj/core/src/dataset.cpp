#include "csda/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "csda/units.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "values.f64le serialization assumes a little-endian host");

namespace csda {

using nlohmann::json;

void GenerationGrid::validate() const {
  require(window_length >= 1, "window length must be >= 1");
  require(!psi_deg.empty(), "generation grid needs at least one psi value");
  require(!p_alpha.empty(), "generation grid needs at least one p_alpha value");
  require(!power_dbw.empty(), "generation grid needs at least one power level");
  require(clean_windows + interfered_windows > 0, "generation grid is empty");
  for (double p : p_alpha) {
    require(p >= 0.0 && p <= 1.0, "p_alpha values must be in [0, 1]");
  }
  for (double psi : psi_deg) {
    require(psi >= 0.0 && psi < 360.0, "psi grid values must be in [0, 360)");
  }
}

namespace {

// Canonical stratum order: clean cells (by psi) ahead of interfered cells
// (by p_alpha, power, psi).
struct CellKeyLess {
  bool operator()(const CellKey& a, const CellKey& b) const {
    if (a.clean() != b.clean()) return a.clean();
    if (a.clean()) return a.psi_deg < b.psi_deg;
    if (*a.p_alpha != *b.p_alpha) return *a.p_alpha < *b.p_alpha;
    if (*a.power_dbw != *b.power_dbw) return *a.power_dbw < *b.power_dbw;
    return a.psi_deg < b.psi_deg;
  }
};

std::string cell_to_string(const CellKey& key) {
  std::ostringstream out;
  if (key.clean()) {
    out << "clean psi=" << key.psi_deg;
  } else {
    out << "interfered p_alpha=" << *key.p_alpha << " I_dbw=" << *key.power_dbw
        << " psi=" << key.psi_deg;
  }
  return out.str();
}

// Spreads `total` over `cells` slots as evenly as possible; the first
// `total % cells` slots in canonical order take the extra window.
void allocate_evenly(std::size_t total, std::size_t first, std::size_t cells,
                     std::vector<CellPlan>& plan) {
  const std::size_t base = total / cells;
  const std::size_t extra = total % cells;
  for (std::size_t i = 0; i < cells; ++i) {
    plan[first + i].count = base + (i < extra ? 1 : 0);
  }
}

}  // namespace

std::vector<CellPlan> plan_cells(const GenerationGrid& grid) {
  grid.validate();
  std::vector<CellPlan> plan;
  for (double psi : grid.psi_deg) {
    plan.push_back({CellKey{std::nullopt, std::nullopt, psi}, 0});
  }
  const std::size_t clean_cells = plan.size();
  for (double p : grid.p_alpha) {
    for (double power : grid.power_dbw) {
      for (double psi : grid.psi_deg) {
        plan.push_back({CellKey{power, p, psi}, 0});
      }
    }
  }
  allocate_evenly(grid.clean_windows, 0, clean_cells, plan);
  allocate_evenly(grid.interfered_windows, clean_cells,
                  plan.size() - clean_cells, plan);
  return plan;
}

CellKey window_cell(const SampleWindow& window) {
  if (!window.meta.interference) {
    return {std::nullopt, std::nullopt, window.meta.psi_deg};
  }
  return {window.meta.interference->power_dbw,
          window.meta.interference->p_alpha, window.meta.psi_deg};
}

Dataset generate(const ScenarioConfig& cfg, const GenerationGrid& grid,
                 std::uint64_t master_seed, int jobs) {
  cfg.validate();
  grid.validate();
  require(jobs >= 1, "jobs must be >= 1");

  const auto plan = plan_cells(grid);

  // Lay out every window's (cell, spec) first so workers can fill disjoint
  // slots in any order.
  struct Slot {
    PhaseAngle psi;
    std::optional<InterferenceSpec> spec;
  };
  std::vector<Slot> slots;
  slots.reserve(grid.clean_windows + grid.interfered_windows);
  for (const auto& cell : plan) {
    std::optional<InterferenceSpec> spec;
    if (!cell.key.clean()) {
      spec = InterferenceSpec{grid.model, *cell.key.power_dbw,
                              *cell.key.p_alpha};
    }
    for (std::size_t i = 0; i < cell.count; ++i) {
      slots.push_back({PhaseAngle(cell.key.psi_deg), spec});
    }
  }

  Dataset ds;
  ds.manifest.scenario = cfg;
  ds.manifest.grid = grid;
  ds.manifest.master_seed = master_seed;
  ds.windows.resize(slots.size());

  const auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(master_seed, i);
      ds.windows[i] = simulate_window(cfg, slots[i].psi, slots[i].spec,
                                      grid.window_length, rng);
    }
  };

  const std::size_t n = slots.size();
  const std::size_t workers = std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(fill, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return ds;
}

SampleWindow regenerate_window(const Dataset& ds, std::size_t index) {
  require(index < ds.windows.size(), "window index out of range");
  const WindowMeta& meta = ds.windows[index].meta;
  RngStream rng(ds.manifest.master_seed, meta.stream_id);
  return simulate_window(ds.manifest.scenario, PhaseAngle(meta.psi_deg),
                         meta.interference, ds.length(), rng);
}

void split_dataset(Dataset& ds, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0,
          "train fraction must be in (0, 1)");
  require(!ds.windows.empty(), "cannot split an empty dataset");

  std::map<CellKey, std::vector<std::uint32_t>, CellKeyLess> strata;
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    strata[window_cell(ds.windows[i])].push_back(
        static_cast<std::uint32_t>(i));
  }

  const std::size_t n = ds.windows.size();
  const auto target =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  require(target >= strata.size() && n - target >= strata.size(),
          "train fraction leaves too few windows to cover every stratum");

  struct Stratum {
    const CellKey* key;
    std::vector<std::uint32_t>* indices;
    double ideal;
    std::size_t take;
  };
  std::vector<Stratum> work;
  for (auto& [key, indices] : strata) {
    if (indices.size() < 2) {
      throw InvalidParameter("stratum too small to split: " +
                             cell_to_string(key) + " has " +
                             std::to_string(indices.size()) + " window(s)");
    }
    const double ideal = static_cast<double>(indices.size()) * train_fraction;
    const auto take = std::clamp<std::size_t>(
        static_cast<std::size_t>(ideal), 1, indices.size() - 1);
    work.push_back({&key, &indices, ideal, take});
  }

  // Largest-remainder repair toward the exact global train count, keeping
  // every stratum within [1, size-1].
  std::size_t total = 0;
  for (const auto& s : work) total += s.take;
  while (total < target) {
    Stratum* best = nullptr;
    for (auto& s : work) {
      if (s.take >= s.indices->size() - 1) continue;
      if (!best || s.ideal - static_cast<double>(s.take) >
                       best->ideal - static_cast<double>(best->take)) {
        best = &s;
      }
    }
    require(best != nullptr, "cannot reach requested train fraction");
    ++best->take;
    ++total;
  }
  while (total > target) {
    Stratum* best = nullptr;
    for (auto& s : work) {
      if (s.take <= 1) continue;
      if (!best || static_cast<double>(s.take) - s.ideal >
                       static_cast<double>(best->take) - best->ideal) {
        best = &s;
      }
    }
    require(best != nullptr, "cannot reach requested train fraction");
    --best->take;
    --total;
  }

  SplitIndices split;
  std::uint64_t stratum_ordinal = 0;
  for (auto& s : work) {
    auto& idx = *s.indices;
    RngStream rng(seed, stratum_ordinal++);
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      const std::size_t j = rng.next_u64() % (i + 1);
      std::swap(idx[i], idx[j]);
    }
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + s.take);
    split.test.insert(split.test.end(), idx.begin() + s.take, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  ds.manifest.split = std::move(split);
}

namespace {

json scenario_to_json(const ScenarioConfig& cfg) {
  return json{{"name", cfg.name},
              {"distance_m", cfg.distance_m},
              {"frequency_hz", cfg.frequency_hz},
              {"tx_power_w", cfg.tx_power_w},
              {"tx_antenna_diameter_m", cfg.tx_antenna.diameter_m},
              {"tx_aperture_efficiency", cfg.tx_antenna.aperture_efficiency},
              {"rx_antenna_diameter_m", cfg.rx_antenna.diameter_m},
              {"rx_aperture_efficiency", cfg.rx_antenna.aperture_efficiency},
              {"tx_loss_db", cfg.tx_loss_db},
              {"rx_loss_db", cfg.rx_loss_db},
              {"rx_radiation_efficiency", cfg.rx_radiation_efficiency},
              {"transmission_line_efficiency", cfg.transmission_line_efficiency},
              {"t_transmission_line_k", cfg.t_transmission_line_k},
              {"t_receiver_k", cfg.t_receiver_k},
              {"t_cmb_k", cfg.t_cmb_k},
              {"bandwidth_hz", cfg.bandwidth_hz},
              {"rician_k", cfg.rician_k},
              {"brightness_t_mean_k", cfg.brightness.t_mean_k},
              {"brightness_t_swing_k", cfg.brightness.t_swing_k},
              {"brightness_phase_lag_deg", cfg.brightness.phase_lag_deg}};
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.name = j.at("name").get<std::string>();
  cfg.distance_m = j.at("distance_m").get<double>();
  cfg.frequency_hz = j.at("frequency_hz").get<double>();
  cfg.tx_power_w = j.at("tx_power_w").get<double>();
  cfg.tx_antenna.diameter_m = j.at("tx_antenna_diameter_m").get<double>();
  cfg.tx_antenna.aperture_efficiency =
      j.at("tx_aperture_efficiency").get<double>();
  cfg.rx_antenna.diameter_m = j.at("rx_antenna_diameter_m").get<double>();
  cfg.rx_antenna.aperture_efficiency =
      j.at("rx_aperture_efficiency").get<double>();
  cfg.tx_loss_db = j.at("tx_loss_db").get<double>();
  cfg.rx_loss_db = j.at("rx_loss_db").get<double>();
  cfg.rx_radiation_efficiency = j.at("rx_radiation_efficiency").get<double>();
  cfg.transmission_line_efficiency =
      j.at("transmission_line_efficiency").get<double>();
  cfg.t_transmission_line_k = j.at("t_transmission_line_k").get<double>();
  cfg.t_receiver_k = j.at("t_receiver_k").get<double>();
  cfg.t_cmb_k = j.at("t_cmb_k").get<double>();
  cfg.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  cfg.rician_k = j.at("rician_k").get<double>();
  cfg.brightness.t_mean_k = j.at("brightness_t_mean_k").get<double>();
  cfg.brightness.t_swing_k = j.at("brightness_t_swing_k").get<double>();
  cfg.brightness.phase_lag_deg = j.at("brightness_phase_lag_deg").get<double>();
  return cfg;
}

json grid_to_json(const GenerationGrid& grid) {
  return json{{"model", static_cast<int>(grid.model)},
              {"window_length", grid.window_length},
              {"psi_deg", grid.psi_deg},
              {"p_alpha", grid.p_alpha},
              {"power_dbw", grid.power_dbw},
              {"clean_windows", grid.clean_windows},
              {"interfered_windows", grid.interfered_windows}};
}

GenerationGrid grid_from_json(const json& j) {
  GenerationGrid grid;
  grid.model = interference_model_from_int(j.at("model").get<int>());
  grid.window_length = j.at("window_length").get<std::size_t>();
  grid.psi_deg = j.at("psi_deg").get<std::vector<double>>();
  grid.p_alpha = j.at("p_alpha").get<std::vector<double>>();
  grid.power_dbw = j.at("power_dbw").get<std::vector<double>>();
  grid.clean_windows = j.at("clean_windows").get<std::size_t>();
  grid.interfered_windows = j.at("interfered_windows").get<std::size_t>();
  return grid;
}

json window_record(const SampleWindow& w, std::size_t id) {
  json rec{{"id", id},
           {"label", to_string(w.label)},
           {"psi_deg", w.meta.psi_deg},
           {"stream_id", w.meta.stream_id}};
  if (w.meta.interference) {
    rec["model"] = static_cast<int>(w.meta.interference->model);
    rec["p_alpha"] = w.meta.interference->p_alpha;
    rec["power_dbw"] = w.meta.interference->power_dbw;
  }
  return rec;
}

}  // namespace

void save(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  json header{{"format", "csda.dataset"},
              {"version", ds.manifest.version},
              {"count", ds.windows.size()},
              {"length", ds.length()},
              {"master_seed", ds.manifest.master_seed},
              {"scenario", scenario_to_json(ds.manifest.scenario)},
              {"grid", grid_to_json(ds.manifest.grid)},
              {"split",
               {{"train", ds.manifest.split.train},
                {"test", ds.manifest.split.test}}}};

  std::ofstream mf(dir / "manifest.jsonl");
  if (!mf) throw IoError("cannot write " + (dir / "manifest.jsonl").string());
  mf << header.dump() << "\n";
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    mf << window_record(ds.windows[i], i).dump() << "\n";
  }
  if (!mf) throw IoError("write failed: " + (dir / "manifest.jsonl").string());

  std::ofstream vf(dir / "values.f64le", std::ios::binary);
  if (!vf) throw IoError("cannot write " + (dir / "values.f64le").string());
  for (const auto& w : ds.windows) {
    if (w.values_db.size() != ds.length()) {
      throw ShapeError("window length mismatch while saving dataset");
    }
    vf.write(reinterpret_cast<const char*>(w.values_db.data()),
             static_cast<std::streamsize>(w.values_db.size() * sizeof(double)));
  }
  if (!vf) throw IoError("write failed: " + (dir / "values.f64le").string());
}

Dataset load(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.jsonl");
  if (!mf) throw IoError("cannot open " + (dir / "manifest.jsonl").string());

  std::string line;
  if (!std::getline(mf, line)) throw FormatError("manifest.jsonl is empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest header is not valid JSON: ") +
                      e.what());
  }
  if (header.value("format", "") != "csda.dataset") {
    throw FormatError("not a dataset manifest (bad format tag)");
  }
  const auto version = header.at("version").get<std::uint32_t>();
  if (version != 1) {
    throw FormatError("unsupported dataset version " + std::to_string(version));
  }

  Dataset ds;
  ds.manifest.version = version;
  ds.manifest.master_seed = header.at("master_seed").get<std::uint64_t>();
  ds.manifest.scenario = scenario_from_json(header.at("scenario"));
  ds.manifest.grid = grid_from_json(header.at("grid"));
  ds.manifest.split.train =
      header.at("split").at("train").get<std::vector<std::uint32_t>>();
  ds.manifest.split.test =
      header.at("split").at("test").get<std::vector<std::uint32_t>>();

  const auto count = header.at("count").get<std::size_t>();
  const auto length = header.at("length").get<std::size_t>();
  if (length != ds.manifest.grid.window_length) {
    throw FormatError("manifest length disagrees with grid window length");
  }

  ds.windows.resize(count);
  std::size_t records = 0;
  while (std::getline(mf, line)) {
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad window record: ") + e.what());
    }
    const auto id = rec.at("id").get<std::size_t>();
    if (id >= count) throw FormatError("window record id out of range");
    SampleWindow& w = ds.windows[id];
    w.label = label_from_string(rec.at("label").get<std::string>());
    w.meta.scenario = ds.manifest.scenario.name;
    w.meta.psi_deg = rec.at("psi_deg").get<double>();
    w.meta.seed = ds.manifest.master_seed;
    w.meta.stream_id = rec.at("stream_id").get<std::uint64_t>();
    if (rec.contains("model")) {
      w.meta.interference =
          InterferenceSpec{interference_model_from_int(rec.at("model").get<int>()),
                           rec.at("power_dbw").get<double>(),
                           rec.at("p_alpha").get<double>()};
    }
    ++records;
  }
  if (records != count) {
    throw FormatError("manifest declares " + std::to_string(count) +
                      " windows but holds " + std::to_string(records) +
                      " records");
  }

  const auto values_path = dir / "values.f64le";
  std::ifstream vf(values_path, std::ios::binary);
  if (!vf) throw IoError("cannot open " + values_path.string());
  const auto bytes = std::filesystem::file_size(values_path);
  const std::uintmax_t row_bytes = length * sizeof(double);
  const std::uintmax_t expected = static_cast<std::uintmax_t>(count) * row_bytes;
  if (bytes != expected) {
    if (row_bytes != 0 && bytes % row_bytes == 0) {
      throw FormatError("manifest/payload length disagreement: manifest declares " +
                        std::to_string(count) + " windows, payload holds " +
                        std::to_string(bytes / row_bytes));
    }
    throw FormatError("truncated payload: values.f64le has " +
                      std::to_string(bytes) + " bytes, expected " +
                      std::to_string(expected));
  }
  for (auto& w : ds.windows) {
    w.values_db.resize(length);
    vf.read(reinterpret_cast<char*>(w.values_db.data()),
            static_cast<std::streamsize>(row_bytes));
    if (!vf) throw IoError("read failed: " + values_path.string());
  }
  return ds;
}

void export_csv(const Dataset& ds, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out.precision(17);
  out << "window_id,label,scenario,model,p_alpha,I_dbw,psi_deg,seed";
  for (std::size_t i = 0; i < ds.length(); ++i) out << ",v" << i;
  out << "\n";
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    const auto& w = ds.windows[i];
    out << i << "," << to_string(w.label) << "," << w.meta.scenario << ",";
    if (w.meta.interference) {
      out << static_cast<int>(w.meta.interference->model) << ","
          << w.meta.interference->p_alpha << ","
          << w.meta.interference->power_dbw;
    } else {
      out << ",,";
    }
    out << "," << w.meta.psi_deg << "," << w.meta.seed;
    for (double v : w.values_db) out << "," << v;
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + file.string());
}

Standardization train_standardization(const Dataset& ds) {
  require(!ds.manifest.split.train.empty(),
          "dataset has no train split; run split first");
  double sum = 0.0;
  std::size_t n = 0;
  for (auto idx : ds.manifest.split.train) {
    for (double v : ds.windows.at(idx).values_db) sum += v;
    n += ds.windows.at(idx).values_db.size();
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (auto idx : ds.manifest.split.train) {
    for (double v : ds.windows.at(idx).values_db) {
      const double d = v - mean;
      ss += d * d;
    }
  }
  const double var = ss / static_cast<double>(n);
  if (var <= 0.0) {
    throw InvalidParameter("train split has zero variance; cannot standardize");
  }
  return {mean, std::sqrt(var)};
}

std::pair<Dataset, Standardization> standardize(const Dataset& ds) {
  const Standardization stats = train_standardization(ds);
  Dataset out = ds;
  for (auto& w : out.windows) {
    for (double& v : w.values_db) v = stats.apply(v);
  }
  return {std::move(out), stats};
}

namespace {

WindowMatrix gather(const Dataset& ds, const std::vector<std::uint32_t>& idx,
                    const Standardization& stats) {
  WindowMatrix m;
  m.rows = idx.size();
  m.cols = ds.length();
  m.values.resize(m.rows * m.cols);
  m.labels.resize(m.rows);
  m.window_ids.assign(idx.begin(), idx.end());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& w = ds.windows.at(idx[r]);
    require_shape(w.values_db.size() == m.cols,
                  "window length mismatch in dataset");
    for (std::size_t c = 0; c < m.cols; ++c) {
      m.values[r * m.cols + c] = stats.apply(w.values_db[c]);
    }
    m.labels[r] = w.label == Label::kInterfered ? 1 : 0;
  }
  return m;
}

}  // namespace

WindowMatrix train_matrix(const Dataset& ds, const Standardization& stats) {
  require(!ds.manifest.split.train.empty(), "dataset has no train split");
  return gather(ds, ds.manifest.split.train, stats);
}

WindowMatrix test_matrix(const Dataset& ds, const Standardization& stats) {
  require(!ds.manifest.split.test.empty(), "dataset has no test split");
  return gather(ds, ds.manifest.split.test, stats);
}

}  // namespace csda

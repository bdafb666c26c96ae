#include "csda/link_budget.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "csda/units.hpp"

namespace csda {

PhaseAngle::PhaseAngle(double degrees) {
  if (!std::isfinite(degrees)) throw InvalidParameter("phase angle must be finite");
  degrees_ = std::fmod(degrees, 360.0);
  if (degrees_ < 0.0) degrees_ += 360.0;
}

double PhaseAngle::radians() const { return deg_to_rad(degrees_); }

bool PhaseAngle::needs_normalization(double degrees) {
  return !(degrees >= 0.0 && degrees < 360.0);
}

void AntennaSpec::validate() const {
  require(diameter_m > 0.0, "antenna diameter must be > 0 m");
  require(aperture_efficiency > 0.0 && aperture_efficiency <= 1.0,
          "aperture efficiency must be in (0, 1]");
}

void BrightnessModel::validate() const {
  require(t_mean_k >= 0.0, "brightness mean temperature must be >= 0 K");
  require(t_swing_k >= 0.0, "brightness temperature swing must be >= 0 K");
  require(phase_lag_deg >= 0.0 && phase_lag_deg < 360.0,
          "brightness phase lag must be in [0, 360) degrees");
}

void ScenarioConfig::validate() const {
  require(distance_m > 0.0, "distance must be > 0 m");
  require(frequency_hz > 0.0, "frequency must be > 0 Hz");
  require(tx_power_w > 0.0, "transmit power must be > 0 W");
  tx_antenna.validate();
  rx_antenna.validate();
  require(tx_loss_db >= 0.0, "transmit loss must be >= 0 dB");
  require(rx_loss_db >= 0.0, "receive loss must be >= 0 dB");
  require(rx_radiation_efficiency > 0.0 && rx_radiation_efficiency <= 1.0,
          "radiation efficiency must be in (0, 1]");
  require(transmission_line_efficiency > 0.0 &&
              transmission_line_efficiency <= 1.0,
          "transmission line efficiency must be in (0, 1]");
  require(t_transmission_line_k >= 0.0, "transmission line temperature must be >= 0 K");
  require(t_receiver_k >= 0.0, "receiver noise temperature must be >= 0 K");
  require(t_cmb_k >= 0.0, "background temperature must be >= 0 K");
  require(bandwidth_hz > 0.0, "bandwidth must be > 0 Hz");
  require(rician_k >= 0.0 && std::isfinite(rician_k),
          "Rician K factor must be finite and >= 0");
  brightness.validate();
}

double aperture_gain(const AntennaSpec& antenna, double frequency_hz) {
  antenna.validate();
  require(frequency_hz > 0.0, "frequency must be > 0 Hz");
  const double x = kPi * antenna.diameter_m * frequency_hz / kSpeedOfLight;
  return antenna.aperture_efficiency * x * x;
}

double aperture_gain_dbi(const AntennaSpec& antenna, double frequency_hz) {
  return to_db(aperture_gain(antenna, frequency_hz));
}

double fspl(double distance_m, double frequency_hz) {
  require(distance_m > 0.0, "distance must be > 0 m");
  require(frequency_hz > 0.0, "frequency must be > 0 Hz");
  const double x = 4.0 * kPi * frequency_hz * distance_m / kSpeedOfLight;
  return x * x;
}

double fspl_db(double distance_m, double frequency_hz) {
  return to_db(fspl(distance_m, frequency_hz));
}

double received_power_w(const ScenarioConfig& cfg) {
  cfg.validate();
  const double gt = aperture_gain(cfg.tx_antenna, cfg.frequency_hz);
  const double gr = aperture_gain(cfg.rx_antenna, cfg.frequency_hz);
  const double lt = from_db(cfg.tx_loss_db);
  const double lr = from_db(cfg.rx_loss_db);
  const double phi = fspl(cfg.distance_m, cfg.frequency_hz);
  return cfg.tx_power_w * gt * gr / (lt * lr * phi);
}

double received_power_dbw(const ScenarioConfig& cfg) {
  return to_db(received_power_w(cfg));
}

double brightness_temperature_k(const BrightnessModel& model, PhaseAngle psi) {
  model.validate();
  const double t = model.t_mean_k +
                   model.t_swing_k *
                       std::cos(deg_to_rad(psi.degrees() - model.phase_lag_deg));
  return std::max(t, 0.0);
}

double operational_temperature_k(const ScenarioConfig& cfg, PhaseAngle psi) {
  cfg.validate();
  const double t_a = brightness_temperature_k(cfg.brightness, psi);
  return cfg.t_cmb_k + t_a +
         cfg.t_transmission_line_k / cfg.rx_radiation_efficiency +
         cfg.t_receiver_k /
             (cfg.rx_radiation_efficiency * cfg.transmission_line_efficiency);
}

double noise_power_w(const ScenarioConfig& cfg, PhaseAngle psi) {
  return kBoltzmann * operational_temperature_k(cfg, psi) * cfg.bandwidth_hz;
}

double noise_psd_w_per_hz(const ScenarioConfig& cfg, PhaseAngle psi) {
  return kBoltzmann * operational_temperature_k(cfg, psi);
}

double mean_snr_db(const ScenarioConfig& cfg, PhaseAngle psi) {
  return to_db(received_power_w(cfg) / noise_power_w(cfg, psi));
}

std::vector<SweepPoint> snr_vs_phase_sweep(const ScenarioConfig& cfg,
                                           double step_deg) {
  require(step_deg > 0.0 && step_deg <= 360.0,
          "sweep step must be in (0, 360] degrees");
  std::vector<SweepPoint> points;
  for (double psi = 0.0; psi < 360.0; psi += step_deg) {
    points.push_back({psi, mean_snr_db(cfg, PhaseAngle(psi))});
  }
  return points;
}

LinkBudgetBreakdown link_budget_breakdown(const ScenarioConfig& cfg,
                                          PhaseAngle psi) {
  cfg.validate();
  LinkBudgetBreakdown b{};
  b.tx_power_dbw = to_db(cfg.tx_power_w);
  b.tx_gain_dbi = aperture_gain_dbi(cfg.tx_antenna, cfg.frequency_hz);
  b.rx_gain_dbi = aperture_gain_dbi(cfg.rx_antenna, cfg.frequency_hz);
  b.tx_loss_db = cfg.tx_loss_db;
  b.rx_loss_db = cfg.rx_loss_db;
  b.fspl_db = fspl_db(cfg.distance_m, cfg.frequency_hz);
  b.received_power_dbw = received_power_dbw(cfg);
  b.psi_deg = psi.degrees();
  b.brightness_temperature_k = brightness_temperature_k(cfg.brightness, psi);
  b.operational_temperature_k = operational_temperature_k(cfg, psi);
  b.noise_psd_dbw_per_hz = to_db(noise_psd_w_per_hz(cfg, psi));
  b.noise_power_dbw = to_db(noise_power_w(cfg, psi));
  b.mean_snr_db = mean_snr_db(cfg, psi);
  return b;
}

ScenarioConfig scenario_preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.frequency_hz = 26.25e9;
  cfg.tx_antenna = {0.254, 0.43};
  cfg.tx_loss_db = 1.0;
  cfg.rx_loss_db = 3.0;
  cfg.transmission_line_efficiency = 0.9;
  cfg.t_transmission_line_k = 30.0;
  cfg.t_receiver_k = 100.0;

  if (name == "gateway") {
    cfg.name = "gateway";
    cfg.distance_m = 70000e3;
    cfg.tx_power_w = 10.0;
    cfg.rx_antenna = {1.5, 0.54};
    cfg.rx_radiation_efficiency = 0.95;
  } else if (name == "llo") {
    cfg.name = "llo";
    cfg.distance_m = 100e3;
    cfg.tx_power_w = 1.0;
    cfg.rx_antenna = {0.1, 0.56};
    cfg.rx_radiation_efficiency = 0.90;
  } else {
    std::string known;
    for (const auto& n : scenario_preset_names()) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    throw InvalidParameter("unknown scenario preset '" + name +
                           "' (known presets: " + known + ")");
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> scenario_preset_names() { return {"gateway", "llo"}; }

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t consumed = 0;
  double out;
  try {
    out = std::stod(value, &consumed);
  } catch (const std::exception&) {
    throw FormatError("config key '" + key + "': not a number: '" + value + "'");
  }
  if (consumed != value.size()) {
    throw FormatError("config key '" + key + "': trailing junk in '" + value + "'");
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      cfg.name = value;
    } else if (key == "distance_m") {
      cfg.distance_m = parse_number(key, value);
    } else if (key == "frequency_hz") {
      cfg.frequency_hz = parse_number(key, value);
    } else if (key == "tx_power_w") {
      cfg.tx_power_w = parse_number(key, value);
    } else if (key == "tx_antenna_diameter_m") {
      cfg.tx_antenna.diameter_m = parse_number(key, value);
    } else if (key == "tx_aperture_efficiency") {
      cfg.tx_antenna.aperture_efficiency = parse_number(key, value);
    } else if (key == "rx_antenna_diameter_m") {
      cfg.rx_antenna.diameter_m = parse_number(key, value);
    } else if (key == "rx_aperture_efficiency") {
      cfg.rx_antenna.aperture_efficiency = parse_number(key, value);
    } else if (key == "tx_loss_db") {
      cfg.tx_loss_db = parse_number(key, value);
    } else if (key == "rx_loss_db") {
      cfg.rx_loss_db = parse_number(key, value);
    } else if (key == "rx_radiation_efficiency") {
      cfg.rx_radiation_efficiency = parse_number(key, value);
    } else if (key == "transmission_line_efficiency") {
      cfg.transmission_line_efficiency = parse_number(key, value);
    } else if (key == "t_transmission_line_k") {
      cfg.t_transmission_line_k = parse_number(key, value);
    } else if (key == "t_receiver_k") {
      cfg.t_receiver_k = parse_number(key, value);
    } else if (key == "t_cmb_k") {
      cfg.t_cmb_k = parse_number(key, value);
    } else if (key == "bandwidth_hz") {
      cfg.bandwidth_hz = parse_number(key, value);
    } else if (key == "rician_k") {
      cfg.rician_k = parse_number(key, value);
    } else if (key == "brightness_t_mean_k") {
      cfg.brightness.t_mean_k = parse_number(key, value);
    } else if (key == "brightness_t_swing_k") {
      cfg.brightness.t_swing_k = parse_number(key, value);
    } else if (key == "brightness_phase_lag_deg") {
      cfg.brightness.phase_lag_deg = parse_number(key, value);
    } else {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string scenario_to_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "name = " << cfg.name << "\n"
      << "distance_m = " << cfg.distance_m << "\n"
      << "frequency_hz = " << cfg.frequency_hz << "\n"
      << "tx_power_w = " << cfg.tx_power_w << "\n"
      << "tx_antenna_diameter_m = " << cfg.tx_antenna.diameter_m << "\n"
      << "tx_aperture_efficiency = " << cfg.tx_antenna.aperture_efficiency << "\n"
      << "rx_antenna_diameter_m = " << cfg.rx_antenna.diameter_m << "\n"
      << "rx_aperture_efficiency = " << cfg.rx_antenna.aperture_efficiency << "\n"
      << "tx_loss_db = " << cfg.tx_loss_db << "\n"
      << "rx_loss_db = " << cfg.rx_loss_db << "\n"
      << "rx_radiation_efficiency = " << cfg.rx_radiation_efficiency << "\n"
      << "transmission_line_efficiency = " << cfg.transmission_line_efficiency << "\n"
      << "t_transmission_line_k = " << cfg.t_transmission_line_k << "\n"
      << "t_receiver_k = " << cfg.t_receiver_k << "\n"
      << "t_cmb_k = " << cfg.t_cmb_k << "\n"
      << "bandwidth_hz = " << cfg.bandwidth_hz << "\n"
      << "rician_k = " << cfg.rician_k << "\n"
      << "brightness_t_mean_k = " << cfg.brightness.t_mean_k << "\n"
      << "brightness_t_swing_k = " << cfg.brightness.t_swing_k << "\n"
      << "brightness_phase_lag_deg = " << cfg.brightness.phase_lag_deg << "\n";
  return out.str();
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

void save_scenario_file(const ScenarioConfig& cfg,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario config: " + path.string());
  out << scenario_to_text(cfg);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace csda

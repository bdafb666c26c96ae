#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csda/errors.hpp"

namespace csda {

// Lunar phase angle in degrees, normalized into [0, 360).
class PhaseAngle {
 public:
  PhaseAngle() = default;
  explicit PhaseAngle(double degrees);

  double degrees() const { return degrees_; }
  double radians() const;

  // True when the input needed wrapping (CLI prints a notice then).
  static bool needs_normalization(double degrees);

 private:
  double degrees_ = 0.0;
};

// Parabolic-dish aperture: gain follows from diameter and efficiency.
struct AntennaSpec {
  double diameter_m = 0.0;
  double aperture_efficiency = 0.0;  // (0, 1]

  void validate() const;
};

// Lunar-surface brightness temperature as seen by the receive antenna,
// parameterized over phase angle:
//
//   T_A(psi) = t_mean + t_swing * cos(psi - phase_lag),  clamped at 0 K.
//
// The mean/swing/lag coefficients are configuration, not physics: published
// measurement fits vary by band, and this artifact only needs the
// characteristic warm-cold cycle.
struct BrightnessModel {
  double t_mean_k = 230.0;
  double t_swing_k = 60.0;
  double phase_lag_deg = 0.0;

  void validate() const;
};

// Everything needed to evaluate one proximity link. Distances, powers and
// temperatures are SI; losses are dB; efficiencies are fractions in (0, 1].
struct ScenarioConfig {
  std::string name = "custom";
  double distance_m = 0.0;
  double frequency_hz = 0.0;
  double tx_power_w = 0.0;
  AntennaSpec tx_antenna;
  AntennaSpec rx_antenna;
  double tx_loss_db = 0.0;
  double rx_loss_db = 0.0;
  double rx_radiation_efficiency = 1.0;      // eta_rad
  double transmission_line_efficiency = 1.0; // eta_TL
  double t_transmission_line_k = 0.0;        // T_TL
  double t_receiver_k = 0.0;                 // T_R
  double t_cmb_k = 2.725;                    // cosmic microwave background
  double bandwidth_hz = 10.0e6;              // B
  double rician_k = 5.0;                     // linear LoS/scatter power ratio
  BrightnessModel brightness;

  void validate() const;
};

// --- Deterministic link-budget terms ----------------------------------------

// Aperture gain eta * (pi * D * f / c)^2, linear.
double aperture_gain(const AntennaSpec& antenna, double frequency_hz);
double aperture_gain_dbi(const AntennaSpec& antenna, double frequency_hz);

// Free-space path loss (4 pi f d / c)^2, linear (>= 1 in the far field).
double fspl(double distance_m, double frequency_hz);
double fspl_db(double distance_m, double frequency_hz);

// Received carrier power P_t * G_t * G_r / (L_t * L_r * fspl), watts.
double received_power_w(const ScenarioConfig& cfg);
double received_power_dbw(const ScenarioConfig& cfg);

double brightness_temperature_k(const BrightnessModel& model, PhaseAngle psi);

// Operational system noise temperature:
//   T_op(psi) = T_CMB + T_A(psi) + T_TL / eta_rad + T_R / (eta_rad * eta_TL).
double operational_temperature_k(const ScenarioConfig& cfg, PhaseAngle psi);

// Noise terms. The SNR denominator is the in-band noise power
// k * T_op(psi) * B; the per-Hz spectral density is exposed separately.
double noise_power_w(const ScenarioConfig& cfg, PhaseAngle psi);
double noise_psd_w_per_hz(const ScenarioConfig& cfg, PhaseAngle psi);

// SNR with the fading term at its unit mean, dB.
double mean_snr_db(const ScenarioConfig& cfg, PhaseAngle psi);

struct SweepPoint {
  double psi_deg;
  double mean_snr_db;
};

// Tabulates mean SNR over psi in [0, 360) at the given step.
std::vector<SweepPoint> snr_vs_phase_sweep(const ScenarioConfig& cfg,
                                           double step_deg);

// Every intermediate of the budget chain, for table printing.
struct LinkBudgetBreakdown {
  double tx_power_dbw;
  double tx_gain_dbi;
  double rx_gain_dbi;
  double tx_loss_db;
  double rx_loss_db;
  double fspl_db;
  double received_power_dbw;
  double psi_deg;
  double brightness_temperature_k;
  double operational_temperature_k;
  double noise_psd_dbw_per_hz;
  double noise_power_dbw;
  double mean_snr_db;
};

LinkBudgetBreakdown link_budget_breakdown(const ScenarioConfig& cfg,
                                          PhaseAngle psi);

// --- Presets and the flat key-value config format ---------------------------

// "gateway": lunar surface user to the Gateway in NRHO (70000 km).
// "llo":     lunar surface user to a low-lunar-orbit satellite (100 km).
ScenarioConfig scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

// One `key = value` pair per line; '#' starts a comment. Keys are the field
// names documented in the README. Unknown keys and malformed lines are
// errors; unspecified keys keep their defaults.
ScenarioConfig parse_scenario_text(const std::string& text);
std::string scenario_to_text(const ScenarioConfig& cfg);

ScenarioConfig load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const ScenarioConfig& cfg,
                        const std::filesystem::path& path);

}  // namespace csda

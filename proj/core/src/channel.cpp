#include "csda/channel.hpp"

#include <cmath>

#include "csda/errors.hpp"
#include "csda/units.hpp"

namespace csda {

FadingSample sample_rician(double k_factor, RngStream& rng) {
  require(k_factor >= 0.0 && std::isfinite(k_factor),
          "Rician K factor must be finite and >= 0");
  const double los = std::sqrt(k_factor / (k_factor + 1.0));
  const double scatter = std::sqrt(1.0 / (k_factor + 1.0));
  const std::complex<double> w = rng.complex_normal();
  return {std::complex<double>(los, 0.0) + scatter * w};
}

double instantaneous_snr_db(const ScenarioConfig& cfg, PhaseAngle psi,
                            const FadingSample& h) {
  return to_db(received_power_w(cfg) * h.power() / noise_power_w(cfg, psi));
}

double instantaneous_sinr_db(const ScenarioConfig& cfg, PhaseAngle psi,
                             const FadingSample& h,
                             double interference_power_w) {
  require(interference_power_w >= 0.0,
          "effective interference power must be >= 0 W");
  return to_db(received_power_w(cfg) * h.power() /
               (noise_power_w(cfg, psi) + interference_power_w));
}

std::string to_string(Label label) {
  return label == Label::kClean ? "clean" : "interfered";
}

Label label_from_string(const std::string& name) {
  if (name == "clean") return Label::kClean;
  if (name == "interfered") return Label::kInterfered;
  throw FormatError("unknown label '" + name + "'");
}

SampleWindow simulate_window(const ScenarioConfig& cfg, PhaseAngle psi,
                             const std::optional<InterferenceSpec>& spec,
                             std::size_t length, RngStream& rng) {
  require(length >= 1, "window length must be >= 1");
  cfg.validate();
  if (spec) spec->validate();

  // Hoist the deterministic budget terms; only the random factors vary
  // per sample.
  const double signal_w = received_power_w(cfg);
  const double noise_w = noise_power_w(cfg, psi);
  const double k_factor = cfg.rician_k;

  SampleWindow window;
  window.values_db.resize(length);
  window.label = spec ? Label::kInterfered : Label::kClean;
  window.meta = {cfg.name, psi.degrees(), spec, rng.seed(), rng.stream_id()};

  for (std::size_t i = 0; i < length; ++i) {
    rng.seek(i * kDrawsPerSample);
    const FadingSample h = sample_rician(k_factor, rng);
    double interference_w = 0.0;
    if (spec) {
      rng.seek(i * kDrawsPerSample + 2);
      const int alpha = gate(*spec, rng);
      if (spec->model == InterferenceModel::kModel1) {
        interference_w = effective_power_model1_w(*spec, alpha);
      } else {
        rng.seek(i * kDrawsPerSample + 3);
        interference_w = effective_power_model2_w(*spec, alpha, rng);
      }
    }
    window.values_db[i] =
        to_db(signal_w * h.power() / (noise_w + interference_w));
  }
  return window;
}

}  // namespace csda

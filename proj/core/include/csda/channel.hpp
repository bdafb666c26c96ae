#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csda/interference.hpp"
#include "csda/link_budget.hpp"
#include "csda/rng.hpp"

namespace csda {

// One multipath fading coefficient, normalized so E[|h|^2] = 1.
struct FadingSample {
  std::complex<double> h;

  double power() const { return std::norm(h); }
};

// Rician draw: h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * w with w ~ CN(0,1) and the
// line-of-sight phase fixed at zero (only |h|^2 enters any recorded value).
// K = 0 degenerates to Rayleigh. Consumes exactly two u64s.
FadingSample sample_rician(double k_factor, RngStream& rng);

double instantaneous_snr_db(const ScenarioConfig& cfg, PhaseAngle psi,
                            const FadingSample& h);

// SINR with an already-realized effective interference power in the
// denominator; zero interference reduces to the SNR exactly.
double instantaneous_sinr_db(const ScenarioConfig& cfg, PhaseAngle psi,
                             const FadingSample& h,
                             double interference_power_w);

enum class Label : std::uint8_t {
  kClean = 0,
  kInterfered = 1,
};

std::string to_string(Label label);
Label label_from_string(const std::string& name);

struct WindowMeta {
  std::string scenario;
  double psi_deg = 0.0;
  std::optional<InterferenceSpec> interference;
  std::uint64_t seed = 0;       // master seed of the owning RNG stream
  std::uint64_t stream_id = 0;  // window index within the dataset
};

// One labeled time series of instantaneous SNR/SINR values in dB.
struct SampleWindow {
  std::vector<double> values_db;
  Label label = Label::kClean;
  WindowMeta meta;
};

// Number of RNG counters reserved per sample. Sample i of a window always
// draws from counters [i * kDrawsPerSample, (i+1) * kDrawsPerSample):
//   +0, +1: fading coefficient h
//   +2:     interference gate alpha
//   +3, +4: model-2 noise-like factor z
// Fixed addressing keeps the fading sequence of a window identical whether
// or not an interference spec is active, which makes clean/interfered
// common-seed comparisons exact.
inline constexpr std::uint64_t kDrawsPerSample = 8;

// Simulates `length` instantaneous SNR (spec absent) or SINR (spec present)
// samples. The window label is kInterfered whenever a spec was active, even
// if every gate draw happened to be zero.
SampleWindow simulate_window(const ScenarioConfig& cfg, PhaseAngle psi,
                             const std::optional<InterferenceSpec>& spec,
                             std::size_t length, RngStream& rng);

}  // namespace csda

#include "csda/channel.hpp"

#include <cmath>
#include <vector>

#include "csda/units.hpp"
#include "doctest.h"
#include "helpers/stats.hpp"

using namespace csda;

namespace {

std::vector<double> rician_powers(double k, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(sample_rician(k, rng).power());
  }
  return out;
}

// Link with exactly known received and noise powers, for hand-checkable
// SINR arithmetic.
ScenarioConfig pinned_link(double rx_power_w, double noise_w) {
  ScenarioConfig cfg;
  cfg.name = "pinned";
  cfg.frequency_hz = 26.25e9;
  cfg.tx_power_w = rx_power_w;
  const double d_unit = kSpeedOfLight / (kPi * cfg.frequency_hz);
  cfg.tx_antenna = {d_unit, 1.0};
  cfg.rx_antenna = {d_unit, 1.0};
  cfg.distance_m = kSpeedOfLight / (4.0 * kPi * cfg.frequency_hz);
  cfg.t_cmb_k = 0.0;
  cfg.bandwidth_hz = 1e6;
  cfg.brightness = {noise_w / (kBoltzmann * 1e6), 0.0, 0.0};
  return cfg;
}

}  // namespace

TEST_CASE("huge K collapses to the pure line-of-sight coefficient") {
  RngStream rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    const FadingSample h = sample_rician(1e12, rng);
    CHECK(std::abs(std::abs(h.h) - 1.0) < 1e-5);
  }
  CHECK_THROWS_AS(sample_rician(-0.5, rng), InvalidParameter);
}

TEST_CASE("K = 0 is Rayleigh: unit-mean exponential power") {
  const auto powers = rician_powers(0.0, 1000000, 2);
  CHECK(testutil::mean(powers) == doctest::Approx(1.0).epsilon(0.01));
  std::vector<double> head(powers.begin(), powers.begin() + 100000);
  CHECK(testutil::ks_statistic(head, testutil::exp1_cdf) < 0.005);
}

TEST_CASE("K = 5 draws recover the K factor by the moment method") {
  const auto powers = rician_powers(5.0, 1000000, 3);
  CHECK(testutil::mean(powers) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(testutil::estimate_rician_k(powers) == doctest::Approx(5.0).epsilon(0.04));
}

TEST_CASE("fading power is normalized to unit mean for every K") {
  std::uint64_t seed = 10;
  for (double k : {0.0, 1.0, 5.0, 10.0, 100.0}) {
    const auto powers = rician_powers(k, 1000000, seed++);
    CHECK(testutil::mean(powers) == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("unit fading reproduces the mean SNR exactly") {
  const ScenarioConfig cfg = scenario_preset("gateway");
  const PhaseAngle psi(120);
  const FadingSample unit{std::complex<double>(1.0, 0.0)};
  CHECK(instantaneous_snr_db(cfg, psi, unit) == mean_snr_db(cfg, psi));

  const FadingSample half{std::complex<double>(std::sqrt(0.5), 0.0)};
  CHECK(instantaneous_snr_db(cfg, psi, half) ==
        doctest::Approx(mean_snr_db(cfg, psi) - 3.0103).epsilon(1e-6));
}

TEST_CASE("gateway chain at 300 K system temperature") {
  ScenarioConfig cfg = scenario_preset("gateway");
  cfg.brightness = {300.0 - 2.725, 0.0, 0.0};
  cfg.t_transmission_line_k = 0.0;
  cfg.t_receiver_k = 0.0;
  cfg.bandwidth_hz = 10e6;
  const FadingSample unit{std::complex<double>(1.0, 0.0)};
  CHECK(std::abs(instantaneous_snr_db(cfg, PhaseAngle(0), unit) - 4.93) < 0.1);
}

TEST_CASE("SINR hand case: signal 1e-12 W over noise+interference 2e-14 W") {
  const ScenarioConfig cfg = pinned_link(1e-12, 1e-14);
  const PhaseAngle psi(0);
  CHECK(noise_power_w(cfg, psi) == doctest::Approx(1e-14).epsilon(1e-9));
  const FadingSample unit{std::complex<double>(1.0, 0.0)};
  CHECK(instantaneous_sinr_db(cfg, psi, unit, 1e-14) ==
        doctest::Approx(10.0 * std::log10(50.0)).epsilon(1e-6));

  // Zero interference reduces to the SNR exactly.
  CHECK(instantaneous_sinr_db(cfg, psi, unit, 0.0) ==
        instantaneous_snr_db(cfg, psi, unit));

  // Interference at the noise floor costs 3.0103 dB.
  const double n = noise_power_w(cfg, psi);
  CHECK(instantaneous_sinr_db(cfg, psi, unit, n) ==
        doctest::Approx(instantaneous_snr_db(cfg, psi, unit) - 3.0103)
            .epsilon(1e-6));

  CHECK_THROWS_AS(instantaneous_sinr_db(cfg, psi, unit, -1.0),
                  InvalidParameter);
}

TEST_CASE("clean windows follow the documented per-sample draw layout") {
  const ScenarioConfig cfg = scenario_preset("llo");
  const PhaseAngle psi(240);
  RngStream rng(77, 5);
  const SampleWindow w = simulate_window(cfg, psi, std::nullopt, 16, rng);
  CHECK(w.label == Label::kClean);
  CHECK(w.meta.scenario == "llo");
  CHECK(w.meta.seed == 77);
  CHECK(w.meta.stream_id == 5);
  REQUIRE(w.values_db.size() == 16);

  for (std::size_t i : {std::size_t(0), std::size_t(7), std::size_t(15)}) {
    RngStream probe(77, 5);
    probe.seek(i * kDrawsPerSample);
    const FadingSample h = sample_rician(cfg.rician_k, probe);
    CHECK(w.values_db[i] == instantaneous_snr_db(cfg, psi, h));
  }
}

TEST_CASE("windows are bit-reproducible under the same stream") {
  const ScenarioConfig cfg = scenario_preset("gateway");
  const InterferenceSpec spec{InterferenceModel::kModel2, -110.0, 0.5};
  RngStream a(9, 3), b(9, 3);
  const SampleWindow wa = simulate_window(cfg, PhaseAngle(10), spec, 256, a);
  const SampleWindow wb = simulate_window(cfg, PhaseAngle(10), spec, 256, b);
  CHECK(wa.values_db == wb.values_db);
  CHECK(wa.label == Label::kInterfered);

  CHECK_THROWS_AS(simulate_window(cfg, PhaseAngle(10), spec, 0, a),
                  InvalidParameter);
}

TEST_CASE("always-on strong interference depresses every sample equally") {
  const ScenarioConfig cfg = scenario_preset("gateway");
  const PhaseAngle psi(250);
  const InterferenceSpec spec{InterferenceModel::kModel1, -100.0, 1.0};

  RngStream ra(4, 8), rb(4, 8);
  const SampleWindow clean = simulate_window(cfg, psi, std::nullopt, 512, ra);
  const SampleWindow hit = simulate_window(cfg, psi, spec, 512, rb);

  const double n = noise_power_w(cfg, psi);
  const double shift = 10.0 * std::log10(1.0 + spec.power_w() / n);
  CHECK(shift > 20.0);  // far above the noise floor
  for (std::size_t i = 0; i < 512; ++i) {
    CHECK(clean.values_db[i] - hit.values_db[i] ==
          doctest::Approx(shift).epsilon(1e-9));
  }
}

TEST_CASE("gating hits the requested fraction of samples") {
  const ScenarioConfig cfg = scenario_preset("llo");
  const PhaseAngle psi(0);
  const InterferenceSpec spec{InterferenceModel::kModel1, -100.0, 0.5};
  RngStream ra(6, 0), rb(6, 0);
  const std::size_t n = 100000;
  const SampleWindow clean = simulate_window(cfg, psi, std::nullopt, n, ra);
  const SampleWindow hit = simulate_window(cfg, psi, spec, n, rb);
  std::size_t gated = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (hit.values_db[i] != clean.values_db[i]) ++gated;
  }
  CHECK(std::abs(static_cast<double>(gated) / static_cast<double>(n) - 0.5) <
        0.005);
}

TEST_CASE("SINR never exceeds SNR for the same draws") {
  const ScenarioConfig cfg = scenario_preset("gateway");
  const PhaseAngle psi(60);
  for (const auto model :
       {InterferenceModel::kModel1, InterferenceModel::kModel2}) {
    for (double i_dbw : {-130.0, -115.0, -100.0}) {
      const InterferenceSpec spec{model, i_dbw, 0.75};
      RngStream ra(13, 2), rb(13, 2);
      const SampleWindow clean =
          simulate_window(cfg, psi, std::nullopt, 4096, ra);
      const SampleWindow hit = simulate_window(cfg, psi, spec, 4096, rb);
      for (std::size_t i = 0; i < clean.values_db.size(); ++i) {
        CHECK(hit.values_db[i] <= clean.values_db[i] + 1e-12);
      }
    }
  }
}

TEST_CASE("raising interference power never raises any sample") {
  const ScenarioConfig cfg = scenario_preset("llo");
  const PhaseAngle psi(240);
  for (const auto model :
       {InterferenceModel::kModel1, InterferenceModel::kModel2}) {
    RngStream ra(21, 4), rb(21, 4);
    const SampleWindow lo = simulate_window(
        cfg, psi, InterferenceSpec{model, -120.0, 0.5}, 4096, ra);
    const SampleWindow hi = simulate_window(
        cfg, psi, InterferenceSpec{model, -105.0, 0.5}, 4096, rb);
    for (std::size_t i = 0; i < lo.values_db.size(); ++i) {
      CHECK(hi.values_db[i] <= lo.values_db[i] + 1e-12);
    }
  }
}

TEST_CASE("clean window samples match the fading law") {
  const ScenarioConfig cfg = scenario_preset("gateway");
  const PhaseAngle psi(0);
  const std::size_t n = 100000;
  RngStream rng(31, 0);
  const SampleWindow w = simulate_window(cfg, psi, std::nullopt, n, rng);

  // Undo the deterministic budget: gamma * N / P_r recovers |h|^2.
  const double scale = noise_power_w(cfg, psi) / received_power_w(cfg);
  std::vector<double> implied;
  implied.reserve(n);
  for (double v : w.values_db) implied.push_back(from_db(v) * scale);

  RngStream href(99, 0);
  std::vector<double> direct;
  direct.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    direct.push_back(sample_rician(cfg.rician_k, href).power());
  }
  CHECK(testutil::ks_statistic_two_sample(implied, direct) < 0.01);
}

TEST_CASE("labels serialize both ways") {
  CHECK(to_string(Label::kClean) == "clean");
  CHECK(label_from_string("interfered") == Label::kInterfered);
  CHECK_THROWS_AS(label_from_string("noisy"), FormatError);
}

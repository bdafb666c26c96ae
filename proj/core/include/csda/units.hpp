#pragma once

#include <cmath>

namespace csda {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K

// Power ratio <-> decibels. All internal computation stays linear;
// dB appears only at I/O boundaries and in recorded SNR samples.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }

}  // namespace csda

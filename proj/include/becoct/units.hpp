#pragma once

// Unit convention: lengths in micrometers, times in milliseconds, hbar = 1.
namespace becoct::units {

inline constexpr double length_unit = 1e-6;  // m
inline constexpr double time_unit = 1e-3;    // s
inline constexpr double hbar = 1.0;

// CODATA 2018
inline constexpr double atomic_mass_constant_si = 1.66053906660e-27;  // kg
inline constexpr double hbar_si = 1.054571817e-34;                    // J s

constexpr double nucleon_mass_in_units() {
  return atomic_mass_constant_si * length_unit * length_unit / (hbar_si * time_unit);
}

// Mass of an atom with the given nucleon number, e.g. 87 for rubidium-87.
double atom_mass(int nucleons);

}  // namespace becoct::units

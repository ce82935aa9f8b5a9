// Physical constants (SI) and the simulation unit system.
//
// Dynamics run in dimensionless units with m = 1 and kbar = 1, so frequencies
// are measured in sqrt(kbar/m) and times in sqrt(m/kbar).  SI values enter
// only through the trap and readout layers.

#pragma once

#include <numbers>

namespace casimir::si {

inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double ca40_mass_amu = 39.9625909;

// e^2 / (4 pi eps0), the Coulomb energy scale in J*m for unit charges
inline constexpr double coulomb_energy_scale =
    elementary_charge * elementary_charge /
    (4.0 * std::numbers::pi * epsilon0);

}  // namespace casimir::si

// Canonical experiment setup: a 20-ion calcium chain in a six-electrode
// surface trap, with the cavity section driven by a tweezer on ion 5.
//
// The electrode block uses adjacent 230 um segments (voltages assigned in
// symmetric pairs outward from the center) on two lateral rows whose
// standoff from the trap axis is calibrated so the mean nearest-neighbor
// spacing is exactly 4.00 um.  The chi profile is supplied as data: flat in
// the cavity section (ions 5-16), rising walls over ions 1-4 / 17-20, with
// the two inner wall values solved so that the matched cavity has
// r0 - l0 = 15.22 d and delta = 0.72 d at tweezer depth alpha = 0.6.

#pragma once

#include "casimir/trap.hpp"

namespace casimir::paper {

inline constexpr double electrode_pitch_m = 230e-6;
inline constexpr double lateral_standoff_m = 302.324e-6;
inline constexpr double height_m = 80e-6;
inline constexpr double rf_omega_sq_kbar = 7.40;
inline constexpr double tweezer_alpha = 0.6;
inline constexpr int tweezer_ion = 4;  // 0-based (ion 5)

inline constexpr double electrode_voltages_V[6] = {-5.61, 1.75, -5.61,
                                                   -5.61, 1.75, -5.61};

// designed chi profile (units of kbar), solved against the matching anchors
inline constexpr double chi_wall[5] = {12.0, 10.0, 8.0, 3.59526961, 0.15321346};
inline constexpr double chi_cavity = -0.01001;

inline Vector chi_profile_kbar(int n_ions = 20) {
    if (n_ions < 10)
        throw invalid_argument_error("paper chi profile needs at least 10 ions");
    Vector chi = Vector::Constant(n_ions, chi_cavity);
    for (int i = 0; i < 5; ++i) {
        chi[i] = chi_wall[i];
        chi[n_ions - 1 - i] = chi_wall[i];
    }
    return chi;
}

inline TrapConfig trap_config() {
    TrapConfig cfg;
    cfg.n_ions = 20;
    cfg.species = IonSpecies{};  // 40Ca+
    cfg.height_m = height_m;
    cfg.rf_omega_sq_kbar = rf_omega_sq_kbar;
    for (int k = 0; k < 6; ++k) {
        Electrode el;
        el.axial_center_m = (k - 2.5) * electrode_pitch_m;
        el.axial_width_m = electrode_pitch_m;
        el.voltage_V = electrode_voltages_V[k];
        el.full_width = false;
        el.lateral_gap_m = lateral_standoff_m;
        cfg.dc_electrodes.push_back(el);
    }
    cfg.chi_override_kbar = chi_profile_kbar();
    return cfg;
}

inline DriveSchedule drive(double omega_D, double t1, double t2) {
    DriveSchedule d;
    d.target_ions = {tweezer_ion};
    d.alpha = tweezer_alpha;
    d.omega_D = omega_D;
    d.t1 = t1;
    d.t2 = t2;
    return d;
}

}  // namespace casimir::paper

// gates.hpp — Rabi gates on a frequency-modulated qubit.  Driving at the
// sideband omega_d = E0 + m*Omega yields the effective Rabi frequency
// Omega_R * J_m(A/Omega); in-phase multi-harmonic driving with weights
// J_m(A/Omega) restores the bare Omega_R.
#pragma once

#include <vector>

#include "qfm/bath.hpp"

namespace qfm {

struct Harmonic {
    int m = 0;
    double weight = 1.0;
    double phase = 0.0;
};

struct RabiDrive {
    double omega_r = 0.0;  // bare Rabi frequency at A = 0
    double omega_d = 0.0;  // drive carrier frequency
    std::vector<Harmonic> harmonics;  // empty = single harmonic at omega_d

    void validate() const;
};

// Omega_R * J_m(A/Omega).  May be negative; the magnitude is the oscillation
// frequency and the sign a phase convention.
double effective_rabi(int m, double modulation_index, double omega_r);

struct RabiMeasurement {
    double frequency = 0.0;     // pi / t of the first population minimum; 0 when frozen
    double max_transfer = 0.0;  // 1 - min excited population over the horizon
    bool frozen = false;        // population never crossed 1/2
    double t_first_min = 0.0;
};

// Integrates the full two-level Hamiltonian
//   H(t) = -(1/2) [e0 + A cos(Omega t)] sigma_z + V(t) sigma_x,
//   V(t) = Omega_R sum_h weight_h cos((omega_d + m_h Omega) t + phase_h)
// in the lab frame (no rotating-wave truncation) from the excited state and
// measures the population-oscillation frequency from the first minimum,
// refined by quadratic interpolation.  Requires omega_d at a sideband
// e0 + m*Omega and omega_r <= Omega/50 for the J_m prediction to apply.
RabiMeasurement simulate_rabi(const DriveParams& drive, const RabiDrive& rabi, double horizon);

// Convenience: drive with harmonics m in [-order, order] weighted by
// J_m(A/Omega), all in phase, which restores the bare Rabi frequency.
RabiMeasurement multiharmonic_recovery(const DriveParams& drive, double omega_r, int order,
                                       double horizon);

// Cross-check frequency extraction: mean-level crossing count of the
// excited-state population.
double measure_rabi_crossings(const std::vector<double>& times,
                              const std::vector<double>& populations);

// Recorded excited-state population, for diagnostics and tests.
struct RabiTrace {
    std::vector<double> times;
    std::vector<double> population;
};

RabiTrace simulate_rabi_trace(const DriveParams& drive, const RabiDrive& rabi, double horizon);

}  // namespace qfm

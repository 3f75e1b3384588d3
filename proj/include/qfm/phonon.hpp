// phonon.hpp — brute-force check of the Markov reduction: one TLS coupled to
// an explicitly discretized phonon bath, evolved without any non-Hermitian
// shortcut, against the golden-rule amplitude rate gamma = (pi/4) v^2 rho.
#pragma once

#include <string>
#include <vector>

namespace qfm {

// Flat spectral window: modes at center + k*mode_spacing for
// |k| <= half_width/mode_spacing, all with coupling amplitude v.
struct PhononBathSpec {
    double center = 0.0;
    double half_width = 0.0;
    double mode_spacing = 0.0;
    double coupling = 0.0;

    int mode_count() const;
    double revival_time() const;  // 2*pi / mode_spacing
    void validate() const;
};

// (pi/4) v^2 / mode_spacing: amplitude decay rate of the TLS; the excited
// probability |b|^2 decays at twice this.  Throws if epsilon is not covered
// by the window.
double golden_rule_rate(const PhononBathSpec& spec, double epsilon);

struct ExplicitDecayResult {
    double fitted_rate = 0.0;   // decay rate of |b(t)|^2
    double lamb_shift = 0.0;    // frequency pull of b's phase (reported, cutoff-dependent)
    double norm_drift = 0.0;    // max | ||state|| - 1 | over the run
    double t_fit_begin = 0.0;
    double t_fit_end = 0.0;
};

// Integrates the TLS-phonon amplitude hierarchy with b(0) = 1, c_k(0) = 0
// (qubit decoupled) and fits the exponential decay of |b|^2.  Requires
// >= 1000 modes and horizon < revival_time(); throws FitRejected when |b|
// regrows (discretization revival) or does not decay measurably.
ExplicitDecayResult simulate_explicit(const PhononBathSpec& spec, double tls_epsilon,
                                      double horizon);

// Regrowth detector shared with the revival guard: true when values rise by
// more than rel_tol above the running minimum after having decayed.
bool detect_regrowth(const std::vector<double>& values, double rel_tol);

}  // namespace qfm

// dynamics.hpp — time integration of the single-excitation amplitudes of a
// frequency-modulated qubit coupled to decaying TLSs, and rate extraction.
//
// Interaction-picture equations (b_n are the physical, decaying amplitudes):
//   da/dt   = -(i/2) sum_n g_n e^{+i[(e0 - eps_n) t + phi(t)]} b_n
//   db_n/dt = -(i/2) g_n   e^{-i[(e0 - eps_n) t + phi(t)]} a  -  gamma_n b_n
// with phi(t) = (A/Omega) sin(Omega t), a(0) = 1, b_n(0) = 0.  The population
// P = |a|^2 + sum |b_n|^2 then obeys dP/dt = -2 sum_n gamma_n |b_n|^2.
#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/analytic.hpp"
#include "qfm/bath.hpp"

namespace qfm {

struct StepSizeError : std::runtime_error {
    explicit StepSizeError(const std::string& why) : std::runtime_error(why) {}
};

struct HorizonError : std::runtime_error {
    explicit HorizonError(const std::string& why) : std::runtime_error(why) {}
};

enum class Scheme { Rk4Fixed, Adaptive };

struct IntegratorControls {
    double dt = 0.0;       // 0 = derive from the step rule below
    double t_max = 5000.0;
    Scheme scheme = Scheme::Rk4Fixed;
    double rtol = 1e-9;    // adaptive mode only
    double atol = 1e-12;
    double record_dt = 0.0;  // 0 = aim for ~4000 records
    bool record_b = false;
};

// Fixed-step rule: dt = (2*pi/50) / max retained angular frequency, where the
// retained frequencies are Omega, the modulation sweep rate A (enters as
// A/Omega cycles per period), every |e0 - eps_n| + A, and the rates gamma, g.
double auto_dt(const BathRealization& bath, const DriveParams& drive);

struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<std::complex<double>> a;
    std::vector<std::complex<double>> b;  // row-major records x n_tls; empty unless recorded
    std::vector<double> population;
    int n_tls = 0;
    std::string bath_fingerprint;
    DriveParams drive;

    std::size_t size() const { return times.size(); }
    double abs_a(std::size_t i) const { return std::abs(a[i]); }
    std::span<const std::complex<double>> b_at(std::size_t i) const {
        return {b.data() + i * static_cast<std::size_t>(n_tls), static_cast<std::size_t>(n_tls)};
    }
};

AmplitudeTrajectory integrate(const BathRealization& bath, const DriveParams& drive,
                              const IntegratorControls& controls);

// Operational rate 1/T with T the first time |a(T)| = 0.99 (linear
// interpolation between steps).  `crossed` is false when |a| never reaches
// 0.99 within t_max; the rate is then 0 and distinguishable from a true 0.
struct Gamma099Result {
    double rate = 0.0;
    bool crossed = false;
    double t_cross = 0.0;
};

Gamma099Result gamma_099(const BathRealization& bath, const DriveParams& drive,
                         const IntegratorControls& controls);

// Least-squares decay rate of |a|^2 over [t1, t2] of a recorded trajectory.
// Throws FitRejected on non-monotone (strong-coupling) windows.
double gamma_expfit(const AmplitudeTrajectory& traj, double t1, double t2);

// Integrate only as long as needed for a clean fit: the fit window starts
// after the bath memory transient and ends once ln|a|^2 has dropped by
// `min_log_drop` below its window-start value (or at t_max).
struct ExpFitEstimate {
    double rate = 0.0;
    double t_window_begin = 0.0;
    double t_window_end = 0.0;
};

ExpFitEstimate estimate_rate_expfit(const BathRealization& bath, const DriveParams& drive,
                                    const IntegratorControls& controls,
                                    double min_log_drop = 0.12);

RateCurve rate_curve(const BathRealization& bath, const DriveParams& drive_template,
                     std::span<const double> e0_grid, RateMethod method,
                     const IntegratorControls& controls, int n_threads = 1);

void trajectory_to_csv(const AmplitudeTrajectory& traj, const std::string& path);

}  // namespace qfm

#include "qfm/gates.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qfm/fit.hpp"
#include "qfm/rk4.hpp"
#include "qfm/specfun.hpp"

namespace qfm {

void RabiDrive::validate() const {
    if (!(omega_r > 0.0)) throw std::invalid_argument("RabiDrive: omega_r must be > 0");
    if (!std::isfinite(omega_d)) throw std::invalid_argument("RabiDrive: omega_d must be finite");
}

double effective_rabi(int m, double modulation_index, double omega_r) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("effective_rabi: omega_r must be > 0");
    return omega_r * bessel_j(m, modulation_index);
}

namespace {

void require_on_sideband(const DriveParams& drive, const RabiDrive& rabi) {
    const double m = (rabi.omega_d - drive.e0) / drive.omega;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)))
        throw std::invalid_argument(
            "simulate_rabi: drive frequency is not at a sideband e0 + m*Omega "
            "(detuned oscillations would not measure a J_m Rabi frequency)");
}

double gate_dt(const DriveParams& drive, const RabiDrive& rabi) {
    double f_max = std::abs(drive.e0) + drive.amp + drive.omega;
    if (rabi.harmonics.empty()) {
        f_max = std::max(f_max, std::abs(rabi.omega_d));
    } else {
        for (const auto& h : rabi.harmonics)
            f_max = std::max(f_max, std::abs(rabi.omega_d + h.m * drive.omega));
    }
    return 2.0 * M_PI / (60.0 * f_max);
}

}  // namespace

RabiTrace simulate_rabi_trace(const DriveParams& drive, const RabiDrive& rabi, double horizon) {
    drive.validate();
    rabi.validate();
    require_on_sideband(drive, rabi);
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_rabi: horizon must be > 0");

    const double dt = gate_dt(drive, rabi);

    auto drive_amplitude = [&](double t) {
        if (rabi.harmonics.empty()) return rabi.omega_r * std::cos(rabi.omega_d * t);
        double v = 0.0;
        for (const auto& h : rabi.harmonics)
            v += h.weight * std::cos((rabi.omega_d + h.m * drive.omega) * t + h.phase);
        return rabi.omega_r * v;
    };

    // H(t) = -(1/2)[e0 + A cos(Omega t)] sigma_z + V(t) sigma_x; the qubit
    // starts in the sigma_z = +1 basis state and we track its population.
    auto rhs = [&](double t, const cvector& y, cvector& dy) {
        const double e = drive.e0 + drive.amp * std::cos(drive.omega * t);
        const double v = drive_amplitude(t);
        dy[0] = std::complex<double>(0.0, -1.0) * (-0.5 * e * y[0] + v * y[1]);
        dy[1] = std::complex<double>(0.0, -1.0) * (v * y[0] + 0.5 * e * y[1]);
    };

    cvector y = {{1.0, 0.0}, {0.0, 0.0}};
    RabiTrace trace;
    trace.times.reserve(static_cast<std::size_t>(horizon / dt) + 2);
    trace.population.reserve(trace.times.capacity());
    rk4_fixed(rhs, y, 0.0, horizon, dt, [&](double t, const cvector& state) {
        trace.times.push_back(t);
        trace.population.push_back(std::norm(state[0]));
        return true;
    });
    return trace;
}

RabiMeasurement simulate_rabi(const DriveParams& drive, const RabiDrive& rabi, double horizon) {
    const RabiTrace trace = simulate_rabi_trace(drive, rabi, horizon);
    const auto& p = trace.population;
    const auto& ts = trace.times;

    RabiMeasurement meas;
    double p_min = 1.0;
    for (double v : p) p_min = std::min(p_min, v);
    meas.max_transfer = 1.0 - p_min;

    if (meas.max_transfer < 0.5) {
        meas.frozen = true;
        return meas;
    }

    // First contiguous below-level segment that actually reaches the bottom
    // of the transfer brackets the first real minimum.  Fast micro-wiggles
    // dent the smooth curve anywhere (including right at the level
    // crossing), so a segment only counts if its own minimum gets within 10%
    // of the global one.
    const double level = p_min + 0.25 * meas.max_transfer;
    const double deep = p_min + 0.10 * meas.max_transfer;
    std::size_t lo = 0, hi = 0, raw_min = 0;
    for (std::size_t i = 0; i < p.size();) {
        if (p[i] >= level) {
            ++i;
            continue;
        }
        std::size_t seg_lo = i, seg_min = i;
        while (i < p.size() && p[i] < level) {
            if (p[i] < p[seg_min]) seg_min = i;
            ++i;
        }
        if (p[seg_min] <= deep) {
            lo = seg_lo;
            hi = i;
            raw_min = seg_min;
            break;
        }
    }
    if (hi == 0) {  // no segment reached the bottom; treat as frozen
        meas.frozen = true;
        return meas;
    }

    // Quadratic vertex fit over the band p < p_min + 0.02 around the raw
    // minimum; wide enough to average the fast micro-oscillations out.
    const double band = p[raw_min] + 0.02;
    std::size_t a = raw_min, b = raw_min;
    while (a > lo && p[a - 1] < band) --a;
    while (b + 1 < hi && p[b + 1] < band) ++b;

    double t_min = ts[raw_min];
    if (b - a >= 8) {
        // least-squares parabola y = c0 + c1 u + c2 u^2, u = t - ts[raw_min]
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, r0 = 0, r1 = 0, r2 = 0;
        for (std::size_t i = a; i <= b; ++i) {
            const double u = ts[i] - ts[raw_min];
            const double u2 = u * u;
            s0 += 1;
            s1 += u;
            s2 += u2;
            s3 += u2 * u;
            s4 += u2 * u2;
            r0 += p[i];
            r1 += p[i] * u;
            r2 += p[i] * u2;
        }
        // normal equations, Cramer solve for c1 and c2
        auto det3 = [](double a00, double a01, double a02, double a10, double a11, double a12,
                       double a20, double a21, double a22) {
            return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
                   a02 * (a10 * a21 - a11 * a20);
        };
        const double det = det3(s0, s1, s2, s1, s2, s3, s2, s3, s4);
        if (std::abs(det) > 1e-30) {
            const double c1 = det3(s0, r0, s2, s1, r1, s3, s2, r2, s4) / det;
            const double c2 = det3(s0, s1, r0, s1, s2, r1, s2, s3, r2) / det;
            if (c2 > 0.0) {
                const double vertex = -c1 / (2.0 * c2);
                if (std::abs(vertex) < ts[b] - ts[a]) t_min = ts[raw_min] + vertex;
            }
        }
    }

    meas.t_first_min = t_min;
    meas.frequency = M_PI / t_min;
    return meas;
}

RabiMeasurement multiharmonic_recovery(const DriveParams& drive, double omega_r, int order,
                                       double horizon) {
    if (order < 0) throw std::invalid_argument("multiharmonic_recovery: order must be >= 0");
    RabiDrive rabi;
    rabi.omega_r = omega_r;
    rabi.omega_d = drive.e0;
    const double x = drive.modulation_index();
    for (int m = -order; m <= order; ++m)
        rabi.harmonics.push_back({m, bessel_j(m, x), 0.0});
    return simulate_rabi(drive, rabi, horizon);
}

double measure_rabi_crossings(const std::vector<double>& times,
                              const std::vector<double>& populations) {
    if (times.size() != populations.size() || times.size() < 2)
        throw std::invalid_argument("measure_rabi_crossings: bad trace");
    double t_first = 0.0, t_last = 0.0;
    int crossings = 0;
    for (std::size_t i = 1; i < populations.size(); ++i) {
        const double prev = populations[i - 1] - 0.5;
        const double cur = populations[i] - 0.5;
        if (prev == 0.0 || prev * cur >= 0.0) continue;
        const double frac = prev / (prev - cur);
        const double t = times[i - 1] + frac * (times[i] - times[i - 1]);
        if (crossings == 0) t_first = t;
        t_last = t;
        ++crossings;
    }
    if (crossings < 2) throw FitRejected("measure_rabi_crossings: fewer than 2 level crossings");
    return M_PI * static_cast<double>(crossings - 1) / (t_last - t_first);
}

}  // namespace qfm

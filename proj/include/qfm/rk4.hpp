// rk4.hpp — fixed-step classical Runge-Kutta over complex state vectors, plus
// a step-doubling adaptive variant.  Fixed step is the default everywhere:
// identical trajectories on every platform and thread count matter more here
// than adaptive speed.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace qfm {

using cvector = std::vector<std::complex<double>>;

struct Rk4Workspace {
    cvector k1, k2, k3, k4, tmp;

    void resize(std::size_t n) {
        k1.assign(n, {});
        k2.assign(n, {});
        k3.assign(n, {});
        k4.assign(n, {});
        tmp.assign(n, {});
    }
};

// One classical RK4 step of size dt applied in place to y at time t.
// Rhs signature: rhs(double t, const cvector& y, cvector& dydt).
template <typename Rhs>
void rk4_step(Rhs&& rhs, double t, double dt, cvector& y, Rk4Workspace& ws) {
    const std::size_t n = y.size();
    rhs(t, y, ws.k1);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k1[i];
    rhs(t + 0.5 * dt, ws.tmp, ws.k2);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k2[i];
    rhs(t + 0.5 * dt, ws.tmp, ws.k3);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + dt * ws.k3[i];
    rhs(t + dt, ws.tmp, ws.k4);
    for (std::size_t i = 0; i < n; ++i)
        y[i] += (dt / 6.0) * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

// Fixed-step loop from t0 to t1.  Observer signature:
//   bool observer(double t, const cvector& y)
// called after every accepted step (and once at t0); returning false stops
// the integration early.
template <typename Rhs, typename Observer>
double rk4_fixed(Rhs&& rhs, cvector& y, double t0, double t1, double dt, Observer&& observer) {
    Rk4Workspace ws;
    ws.resize(y.size());
    double t = t0;
    if (!observer(t, y)) return t;
    while (t < t1) {
        const double h = std::min(dt, t1 - t);
        rk4_step(rhs, t, h, y, ws);
        t += h;
        if (!observer(t, y)) return t;
    }
    return t;
}

// Step-doubling adaptive RK4: compares one step of size h against two steps
// of h/2 and keeps the doubled-step result (local error ~ |y2 - y1| / 15).
template <typename Rhs, typename Observer>
double rk4_adaptive(Rhs&& rhs, cvector& y, double t0, double t1, double h0, double rtol,
                    double atol, Observer&& observer) {
    Rk4Workspace ws;
    ws.resize(y.size());
    cvector y_big, y_half;
    double t = t0;
    double h = h0;
    if (!observer(t, y)) return t;
    while (t < t1) {
        h = std::min(h, t1 - t);
        y_big = y;
        rk4_step(rhs, t, h, y_big, ws);
        y_half = y;
        rk4_step(rhs, t, 0.5 * h, y_half, ws);
        rk4_step(rhs, t + 0.5 * h, 0.5 * h, y_half, ws);

        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double scale = atol + rtol * std::max(std::abs(y_half[i]), std::abs(y[i]));
            err = std::max(err, std::abs(y_big[i] - y_half[i]) / (15.0 * scale));
        }
        if (err <= 1.0) {
            y = y_half;
            t += h;
            if (!observer(t, y)) return t;
        }
        const double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
    }
    return t;
}

}  // namespace qfm

// specfun.hpp — Bessel functions of the first kind and the Fourier sideband
// coefficients of the harmonic phase factor e^{i (A/Omega) sin(Omega t)}.
#pragma once

#include <vector>

namespace qfm {

// Fourier coefficients of exp(i x sin theta) = sum_m values[m] e^{i m theta}
// with values[m] = J_m(x), kept for |m| <= order_cutoff.
struct SidebandCoeffs {
    double x = 0.0;              // modulation index A/Omega
    int order_cutoff = 0;        // M
    std::vector<double> values;  // size 2M+1, coefficient m stored at index m + M

    double operator()(int m) const {
        if (m < -order_cutoff || m > order_cutoff) return 0.0;
        return values[static_cast<std::size_t>(m + order_cutoff)];
    }
    double sum_sq() const;
};

// J_m(x) for integer m (any sign) and 0 <= x <= 1e4, absolute error <= 1e-12.
// Evaluated by backward (Miller) recurrence normalized with sum_m J_m^2 = 1;
// forward recurrence is unstable for m > x and is not used.
double bessel_j(int m, double x);

// J_0(x) .. J_{m_max}(x) in one backward-recurrence pass.
std::vector<double> bessel_j_array(int m_max, double x);

// Cutoff rule: M = ceil(x) + max(20, ceil(10 log10(1/tol))).  The tail beyond
// the turning point m ~ x decays faster than exponentially, so this keeps
// 1 - sum values^2 <= tol across the supported range.
int truncation_order(double x, double tol);

SidebandCoeffs sideband_coeffs(double x, double tol = 1e-10);

// sum_m J_m^4(x), truncated with the same cutoff rule as sideband_coeffs.
double bessel_quartic_sum(double x, double tol = 1e-10);

}  // namespace qfm

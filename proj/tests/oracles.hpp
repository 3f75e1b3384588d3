// oracles.hpp — independent reference evaluations used only by tests: an
// ascending power series and an integral representation for J_m, bisection
// root finding, and adaptive quadrature.  None of these share code with the
// library implementations they check.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

// J_m(x) = sum_k (-1)^k (x/2)^{m+2k} / (k! (m+k)!), in long double.
// Usable up to x ~ 25 before alternating-series cancellation bites.
inline double bessel_series(int m, double x) {
    const bool flip = (m < 0) && (std::abs(m) % 2 != 0);
    const int mm = std::abs(m);
    const long double q = static_cast<long double>(x) / 2.0L;

    long double term = 1.0L;
    for (int i = 1; i <= mm; ++i) term *= q / i;  // (x/2)^m / m!
    long double sum = term;
    for (int k = 1; k <= 600; ++k) {
        term *= -(q * q) / (static_cast<long double>(k) * (mm + k));
        sum += term;
        if (std::abs(term) < 1e-30L * (std::abs(sum) + 1e-30L)) break;
    }
    const double value = static_cast<double>(sum);
    return flip ? -value : value;
}

// J_m(x) = (1/pi) int_0^pi cos(m t - x sin t) dt by composite Simpson.
inline double bessel_integral(int m, double x, int n = 1 << 18) {
    const double h = M_PI / n;
    auto f = [&](double t) { return std::cos(m * t - x * std::sin(t)); };
    double sum = f(0.0) + f(M_PI);
    for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    return sum * h / (3.0 * M_PI);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
    double flo = f(lo);
    if (flo * f(hi) > 0.0) throw std::invalid_argument("bisect: no sign change");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace oracle

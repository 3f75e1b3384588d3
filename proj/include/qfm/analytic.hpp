// analytic.hpp — closed-form relaxation rates and Lamb shifts of a qubit
// coupled transversally to a TLS bath, with and without harmonic frequency
// modulation of the qubit splitting.
//
// Static (undriven) rate per TLS:
//   Gamma_static(E0) = (1/2) g^2 gamma / ((E0 - eps)^2 + gamma^2)
// Driven complex rate kernel (weak coupling, Omega > gamma):
//   C = (1/4) sum_n sum_m g_n^2 J_m^2(A/Omega) / (gamma_n - i(E0 + m Omega - eps_n))
// with decay rate Gamma = 2 Re C and energy shift Delta_E = Im C, so every
// TLS absorption Lorentzian is replicated at spacings Omega with weight J_m^2.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qfm/bath.hpp"

namespace qfm {

struct ComplexRate {
    std::complex<double> c;
    int truncation_order = 0;
    // Set when drive.omega <= max gamma_n, outside the kernel's validity
    // regime; the value is still returned and the caller decides.
    bool validity_warning = false;

    double rate() const { return 2.0 * c.real(); }
    double energy_shift() const { return c.imag(); }
};

double gamma_static(double e0, const TlsParams& tls);

ComplexRate complex_rate(double e0, const BathRealization& bath, const DriveParams& drive,
                         double tol = 1e-10);

double gamma_modulated(double e0, const BathRealization& bath, const DriveParams& drive,
                       double tol = 1e-10);

// Im of the rate kernel restricted to TLSs with 0 < eps_n <= 2*e0 (the
// fluctuating low-frequency part; the logarithmic high-frequency part is
// absorbed into e0 by convention).  Requires e0 > 0.
double lamb_shift_low(double e0, const BathRealization& bath, const DriveParams& drive,
                      double tol = 1e-10);

enum class RateMethod { Analytic, Gamma099, ExpFit };

std::string rate_method_name(RateMethod m);
RateMethod rate_method_from_name(const std::string& name);

// Point flags carried alongside a rate curve.
enum class PointFlag : unsigned char { Ok = 0, NoCrossing = 1, FitRejected = 2 };

struct RateCurve {
    std::vector<double> e0_grid;
    std::vector<double> rates;
    std::vector<PointFlag> flags;
    RateMethod method = RateMethod::Analytic;
    double amp = 0.0;
    double omega = 1.0;
    std::string bath_fingerprint;
};

}  // namespace qfm

#include "qfm/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "qfm/specfun.hpp"

namespace qfm {

double gamma_static(double e0, const TlsParams& tls) {
    tls.validate();
    const double d = e0 - tls.epsilon;
    return 0.5 * tls.g * tls.g * tls.gamma / (d * d + tls.gamma * tls.gamma);
}

namespace {

// Coefficients with |J_m| below this contribute < 1e-28 to the kernel and are
// skipped; at A = 0 this collapses the sideband sum to the m = 0 term.
constexpr double kNegligibleCoeff = 1e-14;

std::complex<double> kernel_sum(double e0, const BathRealization& bath, const DriveParams& drive,
                                const SidebandCoeffs& coeffs, bool low_part_only) {
    double re = 0.0, im = 0.0;
    const int order = coeffs.order_cutoff;
    for (const auto& t : bath.tls) {
        if (low_part_only && !(t.epsilon > 0.0 && t.epsilon <= 2.0 * e0)) continue;
        const double g2 = t.g * t.g;
        const double gamma = t.gamma;
        for (int m = -order; m <= order; ++m) {
            const double jm = coeffs(m);
            if (std::abs(jm) < kNegligibleCoeff) continue;
            const double w = g2 * jm * jm;
            const double delta = e0 + m * drive.omega - t.epsilon;
            const double denom = gamma * gamma + delta * delta;
            re += w * gamma / denom;
            im += w * delta / denom;
        }
    }
    return {0.25 * re, 0.25 * im};
}

}  // namespace

ComplexRate complex_rate(double e0, const BathRealization& bath, const DriveParams& drive,
                         double tol) {
    drive.validate();
    const SidebandCoeffs coeffs = sideband_coeffs(drive.modulation_index(), tol);

    ComplexRate result;
    result.truncation_order = coeffs.order_cutoff;
    result.validity_warning = !bath.tls.empty() && drive.omega <= bath.gamma_max();
    result.c = kernel_sum(e0, bath, drive, coeffs, false);
    return result;
}

double gamma_modulated(double e0, const BathRealization& bath, const DriveParams& drive,
                       double tol) {
    return complex_rate(e0, bath, drive, tol).rate();
}

double lamb_shift_low(double e0, const BathRealization& bath, const DriveParams& drive,
                      double tol) {
    if (!(e0 > 0.0)) throw std::invalid_argument("lamb_shift_low: requires e0 > 0");
    drive.validate();
    const SidebandCoeffs coeffs = sideband_coeffs(drive.modulation_index(), tol);
    return kernel_sum(e0, bath, drive, coeffs, true).imag();
}

std::string rate_method_name(RateMethod m) {
    switch (m) {
        case RateMethod::Analytic: return "analytic";
        case RateMethod::Gamma099: return "gamma099";
        case RateMethod::ExpFit: return "expfit";
    }
    return "analytic";
}

RateMethod rate_method_from_name(const std::string& name) {
    if (name == "analytic") return RateMethod::Analytic;
    if (name == "gamma099") return RateMethod::Gamma099;
    if (name == "expfit") return RateMethod::ExpFit;
    throw std::invalid_argument("unknown rate method: " + name);
}

}  // namespace qfm

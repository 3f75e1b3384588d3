#include "qfm/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qfm {

namespace {

constexpr double kMaxArgument = 1.0e4;

void check_argument(double x) {
    if (!(x >= 0.0)) throw std::domain_error("bessel_j: argument must be >= 0");
    if (x > kMaxArgument) throw std::domain_error("bessel_j: argument above supported range 1e4");
}

// Start order for the downward recurrence: safely above both the turning
// point m ~ x (where J_m stops oscillating and starts decaying) and the
// highest requested order.  The x^(1/3) term tracks the Airy transition width.
int start_order(int m_max, double x) {
    const int above_x = static_cast<int>(std::ceil(x)) + 40 +
                        static_cast<int>(std::ceil(12.0 * std::cbrt(x + 1.0)));
    const int above_m = m_max + 40;
    return std::max(above_x, above_m);
}

// Three-term ascending series, adequate for x << 1 where the recurrence
// would overflow its own growth factors.
std::vector<double> bessel_small_x(int m_max, double x) {
    std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
    const double q = 0.5 * x;
    const double q2 = q * q;
    double lead = 1.0;  // (x/2)^m / m!
    for (int m = 0; m <= m_max; ++m) {
        const double c1 = q2 / (m + 1.0);
        const double c2 = q2 * q2 / (2.0 * (m + 1.0) * (m + 2.0));
        out[static_cast<std::size_t>(m)] = lead * (1.0 - c1 + c2);
        lead *= q / (m + 1.0);
        if (lead == 0.0) break;
    }
    return out;
}

}  // namespace

std::vector<double> bessel_j_array(int m_max, double x) {
    if (m_max < 0) throw std::invalid_argument("bessel_j_array: m_max must be >= 0");
    check_argument(x);

    std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x < 1e-3) return bessel_small_x(m_max, x);

    const int start = start_order(m_max, x);
    const double scale_cap = 1e120;
    const double scale_down = 1e-120;

    // f_{start+1} = 0, f_start = tiny seed; J_m(x) > 0 for m above the turning
    // point, so the seed sign fixes all signs after normalization.
    double fp = 0.0;    // f_{m+1}
    double f = 1e-120;  // f_m
    double norm = 0.0, comp = 0.0;  // Kahan-compensated sum of f_m^2 (m >= 1 doubled)

    auto accumulate = [&](double value) {
        const double y = value - comp;
        const double t = norm + y;
        comp = (t - norm) - y;
        norm = t;
    };

    for (int m = start; m >= 1; --m) {
        if (m <= m_max) out[static_cast<std::size_t>(m)] = f;
        accumulate(2.0 * f * f);
        const double fm1 = (2.0 * m / x) * f - fp;
        fp = f;
        f = fm1;
        if (std::abs(f) > scale_cap) {
            f *= scale_down;
            fp *= scale_down;
            norm *= scale_down * scale_down;
            comp *= scale_down * scale_down;
            for (auto& v : out) v *= scale_down;
        }
    }
    out[0] = f;
    accumulate(f * f);

    const double inv = 1.0 / std::sqrt(norm);
    for (auto& v : out) v *= inv;
    return out;
}

double bessel_j(int m, double x) {
    const int mm = std::abs(m);
    const std::vector<double> arr = bessel_j_array(mm, x);
    double value = arr[static_cast<std::size_t>(mm)];
    if (m < 0 && (mm % 2) != 0) value = -value;  // J_{-m} = (-1)^m J_m
    return value;
}

int truncation_order(double x, double tol) {
    check_argument(x);
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("truncation_order: tol must be in (0,1)");
    const int digits = static_cast<int>(std::ceil(10.0 * std::log10(1.0 / tol)));
    return static_cast<int>(std::ceil(x)) + std::max(20, digits);
}

double SidebandCoeffs::sum_sq() const {
    double s = 0.0, c = 0.0;
    for (double v : values) {
        const double y = v * v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

SidebandCoeffs sideband_coeffs(double x, double tol) {
    const int order = truncation_order(x, tol);
    const std::vector<double> arr = bessel_j_array(order, x);

    SidebandCoeffs sc;
    sc.x = x;
    sc.order_cutoff = order;
    sc.values.assign(2 * static_cast<std::size_t>(order) + 1, 0.0);
    for (int m = 0; m <= order; ++m) {
        const double v = arr[static_cast<std::size_t>(m)];
        sc.values[static_cast<std::size_t>(order + m)] = v;
        sc.values[static_cast<std::size_t>(order - m)] = (m % 2 == 0) ? v : -v;
    }
    return sc;
}

double bessel_quartic_sum(double x, double tol) {
    const int order = truncation_order(x, tol);
    const std::vector<double> arr = bessel_j_array(order, x);
    double s = 0.0, c = 0.0;
    auto add = [&](double value) {
        const double y = value - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    };
    const double j0 = arr[0];
    add(j0 * j0 * j0 * j0);
    for (int m = 1; m <= order; ++m) {
        const double j = arr[static_cast<std::size_t>(m)];
        add(2.0 * j * j * j * j);
    }
    return s;
}

}  // namespace qfm

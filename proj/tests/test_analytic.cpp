#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfm/analytic.hpp"
#include "qfm/rng.hpp"
#include "qfm/specfun.hpp"

using namespace qfm;

namespace {

TlsParams make_tls(double eps, double g, double gamma) {
    TlsParams t;
    t.epsilon = eps;
    t.g = g;
    t.gamma = gamma;
    return t;
}

BathRealization single(const TlsParams& t) {
    BathRealization bath;
    bath.tls = {t};
    return bath;
}

DriveParams drive_at(double e0, double amp, double omega = 1.0) {
    DriveParams d;
    d.e0 = e0;
    d.amp = amp;
    d.omega = omega;
    return d;
}

BathRealization random_bath(std::uint64_t seed, int n) {
    Rng rng(seed);
    BathRealization bath;
    for (int i = 0; i < n; ++i)
        bath.tls.push_back(make_tls(rng.uniform(-20.0, 20.0), rng.uniform(0.005, 0.03),
                                    rng.uniform(0.05, 0.3)));
    std::sort(bath.tls.begin(), bath.tls.end(),
              [](const TlsParams& a, const TlsParams& b) { return a.epsilon < b.epsilon; });
    return bath;
}

}  // namespace

TEST_CASE("static rate: resonance value g^2/(2 gamma)") {
    const TlsParams t = make_tls(3.0, 0.02, 0.2);
    CHECK(gamma_static(3.0, t) == doctest::Approx(t.g * t.g / (2.0 * t.gamma)).epsilon(1e-12));

    // strongly coupled TLS of the single-defect setup
    const TlsParams s = make_tls(0.0, 2.0 / 3.0 * 1e-1, 0.02);
    CHECK(gamma_static(0.0, s) == doctest::Approx(0.111111111111).epsilon(1e-9));
    CHECK(gamma_static(1.0, s) == doctest::Approx(4.4427e-5).epsilon(1e-3));
}

TEST_CASE("undriven kernel reduces to the static Lorentzian") {
    const TlsParams t = make_tls(1.5, 0.015, 0.12);
    for (double e0 : {-2.0, 0.0, 1.5, 1.55, 4.0}) {
        const ComplexRate c = complex_rate(e0, single(t), drive_at(e0, 0.0));
        CAPTURE(e0);
        CHECK(c.rate() == doctest::Approx(gamma_static(e0, t)).epsilon(1e-12));
        // closed form of the single-TLS kernel
        const std::complex<double> expected =
            0.25 * t.g * t.g / std::complex<double>(t.gamma, -(e0 - t.epsilon));
        CHECK(std::abs(c.c - expected) < 1e-15);
    }
}

TEST_CASE("empty coupling gives zero rate") {
    BathRealization bath;
    const ComplexRate c = complex_rate(0.3, bath, drive_at(0.3, 5.0));
    CHECK(c.c == std::complex<double>(0.0, 0.0));
}

TEST_CASE("undriven bath rate is the sum of static Lorentzians") {
    const BathRealization bath = random_bath(8, 25);
    for (double e0 : {-7.3, 0.0, 2.0, 13.1}) {
        double expected = 0.0;
        for (const auto& t : bath.tls) expected += gamma_static(e0, t);
        CHECK(gamma_modulated(e0, bath, drive_at(e0, 0.0)) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("rate is additive over disjoint TLS subsets") {
    const BathRealization bath = random_bath(17, 30);
    BathRealization left, right;
    for (int i = 0; i < bath.size(); ++i)
        (i % 2 == 0 ? left : right).tls.push_back(bath.tls[static_cast<std::size_t>(i)]);

    const DriveParams drive = drive_at(0.7, 12.0);
    const double whole = gamma_modulated(0.7, bath, drive);
    const double parts = gamma_modulated(0.7, left, drive) + gamma_modulated(0.7, right, drive);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
    CHECK(whole >= 0.0);
}

TEST_CASE("driven peaks replicate at sideband spacings with J_m^2 weights") {
    // modest index keeps the check cheap; the acceptance suite covers A/Omega = 20
    const double g = 1e-4, gamma = 1e-3, x = 3.0;
    const TlsParams t = make_tls(0.0, g, gamma);
    const BathRealization bath = single(t);
    for (int m = -3; m <= 3; ++m) {
        const double peak = gamma_modulated(m * 1.0, bath, drive_at(m * 1.0, x));
        const double expected = 0.5 * g * g * bessel_j(m, x) * bessel_j(m, x) / gamma;
        CAPTURE(m);
        CHECK(peak == doctest::Approx(expected).epsilon(5e-3));
    }
}

TEST_CASE("modulation redistributes but conserves integrated absorption") {
    const double g = 0.01, gamma = 0.01;
    const BathRealization bath = single(make_tls(0.0, g, gamma));
    auto integral = [&](double amp) {
        // unit segments centered on the replica positions keep every narrow
        // Lorentzian on a quadrature subdivision point
        const double lim = amp + 10.0 * gamma + 10.0;
        auto f = [&](double e0) { return gamma_modulated(e0, bath, drive_at(e0, amp)); };
        const int m_max = static_cast<int>(std::ceil(lim - 0.5));
        double total = oracle::integrate(f, -lim, -m_max - 0.5, 1e-12) +
                       oracle::integrate(f, m_max + 0.5, lim, 1e-12);
        for (int m = -m_max; m <= m_max; ++m)
            total += oracle::integrate(f, m - 0.5, m + 0.5, 1e-12);
        return total;
    };
    const double target = 0.5 * M_PI * g * g;
    const double i0 = integral(0.0);
    const double i5 = integral(5.0);
    const double i20 = integral(20.0);
    // absolute agreement is limited by the Lorentzian tails outside the
    // window (~ (2/pi) gamma / window); A-independence is much tighter
    CHECK(std::abs(i0 - target) / target < 1.5e-3);
    CHECK(std::abs(i5 - target) / target < 1.5e-3);
    CHECK(std::abs(i20 - target) / target < 1.5e-3);
    CHECK(std::abs(i5 / i0 - 1.0) < 4e-4);
    CHECK(std::abs(i20 / i0 - 1.0) < 4e-4);
}

TEST_CASE("vanishing-index continuity") {
    const BathRealization bath = random_bath(99, 10);
    double prev = 1e9;
    for (double amp : {1e-2, 1e-3, 1e-4}) {
        double worst = 0.0;
        for (double e0 = -5.0; e0 <= 5.0; e0 += 0.5) {
            const double d = std::abs(gamma_modulated(e0, bath, drive_at(e0, amp)) -
                                      gamma_modulated(e0, bath, drive_at(e0, 0.0)));
            worst = std::max(worst, d / gamma_modulated(e0, bath, drive_at(e0, 0.0)));
        }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-7);
}

TEST_CASE("validity flag raised when the drive is slower than the bath widths") {
    const BathRealization bath = single(make_tls(0.0, 0.01, 0.2));
    CHECK_FALSE(complex_rate(0.0, bath, drive_at(0.0, 0.0, 1.0)).validity_warning);
    CHECK(complex_rate(0.0, bath, drive_at(0.0, 0.0, 0.1)).validity_warning);
}

TEST_CASE("low-frequency Lamb shift: antisymmetry and boundary handling") {
    const double e0 = 50.0;
    BathRealization bath;
    // mirror pairs around e0 with identical couplings cancel exactly
    for (double d : {0.5, 1.7, 3.2, 9.9}) {
        bath.tls.push_back(make_tls(e0 - d, 0.01, 0.1));
        bath.tls.push_back(make_tls(e0 + d, 0.01, 0.1));
    }
    std::sort(bath.tls.begin(), bath.tls.end(),
              [](const TlsParams& a, const TlsParams& b) { return a.epsilon < b.epsilon; });
    CHECK(std::abs(lamb_shift_low(e0, bath, drive_at(e0, 0.0))) < 1e-15);
    CHECK(std::abs(lamb_shift_low(e0, bath, drive_at(e0, 8.0))) < 1e-15);

    // a TLS exactly at 2*e0 belongs to the low part; just above it does not
    const BathRealization at_edge = single(make_tls(2.0 * e0, 0.01, 0.1));
    CHECK(lamb_shift_low(e0, at_edge, drive_at(e0, 0.0)) != 0.0);
    const BathRealization above_edge = single(make_tls(2.0 * e0 + 1e-6, 0.01, 0.1));
    CHECK(lamb_shift_low(e0, above_edge, drive_at(e0, 0.0)) == 0.0);

    CHECK_THROWS_AS(lamb_shift_low(-1.0, bath, drive_at(-1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("energy shift sign follows the detuning") {
    const TlsParams t = make_tls(10.0, 0.01, 0.1);
    const ComplexRate below = complex_rate(9.0, single(t), drive_at(9.0, 0.0));
    const ComplexRate above = complex_rate(11.0, single(t), drive_at(11.0, 0.0));
    CHECK(below.energy_shift() < 0.0);
    CHECK(above.energy_shift() > 0.0);
    CHECK(below.energy_shift() == doctest::Approx(-above.energy_shift()).epsilon(1e-12));
}

#include <doctest.h>

#include <cmath>

#include "qfm/ensemble.hpp"
#include "qfm/rng.hpp"
#include "qfm/specfun.hpp"

using namespace qfm;

namespace {

BathSpec stats_spec(std::uint64_t seed = 60, int n_tls = 160, double gamma_scale = 1.0) {
    BathSpec spec;
    spec.n_tls = n_tls;
    spec.spacing = 5.0 / 3.0;
    spec.layout = EpsilonLayout::UniformRandom;
    spec.g_min = 2.0 / 3.0 * 1e-2;
    spec.g_max = 10.0 / 3.0 * 1e-2;
    spec.gamma_min = 2.0 / 3.0 * 1e-1 * gamma_scale;
    spec.gamma_max = 10.0 / 3.0 * 1e-1 * gamma_scale;
    spec.seed = seed;
    return spec;
}

DriveParams drive_with_index(double x) {
    DriveParams d;
    d.omega = 1.0;
    d.amp = x;
    return d;
}

}  // namespace

TEST_CASE("predicted mean: closed form of the uniform second moment") {
    const BathSpec spec = stats_spec();
    // pi <g^2> / (2 Delta) with <g^2> = (31/3) * 1e-4 / 22500... = 4.59259e-4
    CHECK(predicted_mean(spec) == doctest::Approx(4.32842e-4).epsilon(1e-4));

    BathSpec point = spec;
    point.g_min = point.g_max = 0.02;
    CHECK(predicted_mean(point) ==
          doctest::Approx(M_PI * 0.02 * 0.02 / (2.0 * spec.spacing)).epsilon(1e-12));

    BathSpec doubled = spec;
    doubled.spacing *= 2.0;
    CHECK(predicted_mean(doubled) == doctest::Approx(0.5 * predicted_mean(spec)).epsilon(1e-12));
}

TEST_CASE("predicted variance: static value and modulated suppression") {
    const BathSpec spec = stats_spec();
    CHECK(predicted_variance(spec, 0.0) == doctest::Approx(4.38766e-7).epsilon(1e-4));

    // sigma(A)/sigma(0) = sqrt(sum J_m^4), strictly decreasing at large index
    double prev = 1.0;
    for (double x : {4.0, 8.0, 16.0, 32.0}) {
        const double ratio =
            std::sqrt(predicted_variance(spec, x) / predicted_variance(spec, 0.0));
        CHECK(ratio == doctest::Approx(std::sqrt(bessel_quartic_sum(x))).epsilon(1e-12));
        CHECK(ratio < prev);
        prev = ratio;
    }

    // relative spread in the static case with typical values
    CHECK(relative_std_static_typical(5.0 / 3.0, 0.2) == doctest::Approx(1.1517).epsilon(1e-3));
}

TEST_CASE("Monte Carlo mean matches the prediction and ignores the drive") {
    const BathSpec spec = stats_spec(11);
    const double pm = predicted_mean(spec);
    const EnsembleStats still = monte_carlo_stats(spec, drive_with_index(0.0), E0Policy{}, 2000,
                                                  RateMethod::Analytic);
    const EnsembleStats driven = monte_carlo_stats(spec, drive_with_index(20.0), E0Policy{}, 2000,
                                                   RateMethod::Analytic);
    CHECK(std::abs(still.mean - pm) < 3.0 * still.std_err_mean);
    CHECK(std::abs(driven.mean - pm) < 3.0 * driven.std_err_mean);
    CHECK(std::abs(driven.mean - still.mean) <
          3.0 * std::sqrt(still.std_err_mean * still.std_err_mean +
                          driven.std_err_mean * driven.std_err_mean));
    CHECK(still.std_err_mean == doctest::Approx(std::sqrt(still.variance / still.n_realizations)));
}

TEST_CASE("Monte Carlo variance matches the quartic-sum law") {
    // gamma_typ = 0.1 Omega keeps the neglected Lorentzian-overlap
    // contribution (order gamma^2/Omega^2) well below the tolerance
    const BathSpec spec = stats_spec(12, 160, 0.5);
    const EnsembleStats still = monte_carlo_stats(spec, drive_with_index(0.0), E0Policy{}, 3000,
                                                  RateMethod::Analytic);
    CHECK(still.variance == doctest::Approx(predicted_variance(spec, 0.0)).epsilon(0.10));
    const EnsembleStats driven = monte_carlo_stats(spec, drive_with_index(20.0), E0Policy{}, 3000,
                                                   RateMethod::Analytic);
    CHECK(driven.variance == doctest::Approx(predicted_variance(spec, 20.0)).epsilon(0.15));
    CHECK(driven.variance < still.variance);
}

TEST_CASE("mean is estimator-independent in the weak-coupling regime") {
    BathSpec spec = stats_spec(13, 12);
    const DriveParams drive = drive_with_index(4.0);
    IntegratorControls c;
    c.t_max = 3000.0;
    const EnsembleStats ana =
        monte_carlo_stats(spec, drive, E0Policy{}, 64, RateMethod::Analytic, c);
    const EnsembleStats fit = monte_carlo_stats(spec, drive, E0Policy{}, 64, RateMethod::ExpFit, c);
    const double err = std::sqrt(ana.std_err_mean * ana.std_err_mean +
                                 fit.std_err_mean * fit.std_err_mean);
    // identical substreams, so the two estimators see the same baths and the
    // difference is pure estimator systematics
    CHECK(std::abs(ana.mean - fit.mean) < std::max(3.0 * err, 0.05 * ana.mean));
}

TEST_CASE("estimator failures beyond 5% abort the run") {
    const BathSpec spec = stats_spec(14, 8);
    IntegratorControls c;
    c.t_max = 5.0;  // far too short for any 0.99 crossing
    CHECK_THROWS_AS(monte_carlo_stats(spec, drive_with_index(0.0), E0Policy{}, 16,
                                      RateMethod::Gamma099, c),
                    EstimatorFailure);
}

TEST_CASE("standard error shrinks as sqrt(n)") {
    const BathSpec spec = stats_spec(15);
    const EnsembleStats a =
        monte_carlo_stats(spec, drive_with_index(0.0), E0Policy{}, 2000, RateMethod::Analytic);
    const EnsembleStats b =
        monte_carlo_stats(spec, drive_with_index(0.0), E0Policy{}, 4000, RateMethod::Analytic);
    CHECK(b.std_err_mean == doctest::Approx(a.std_err_mean / std::sqrt(2.0)).epsilon(0.10));
}

TEST_CASE("worker count does not change the statistics") {
    const BathSpec spec = stats_spec(16);
    const EnsembleStats serial =
        monte_carlo_stats(spec, drive_with_index(8.0), E0Policy{}, 600, RateMethod::Analytic, {}, 1);
    const EnsembleStats parallel =
        monte_carlo_stats(spec, drive_with_index(8.0), E0Policy{}, 600, RateMethod::Analytic, {}, 4);
    CHECK(serial.mean == parallel.mean);
    CHECK(serial.variance == parallel.variance);
}

TEST_CASE("fixed-e0 policy is honored") {
    const BathSpec spec = stats_spec(17, 40);
    E0Policy fixed;
    fixed.kind = E0Policy::Kind::Fixed;
    fixed.value = 0.37;
    const EnsembleStats s =
        monte_carlo_stats(spec, drive_with_index(0.0), fixed, 200, RateMethod::Analytic);
    CHECK(s.n_realizations == 200);
    CHECK(s.mean > 0.0);
}

TEST_CASE("scaling fit: suppression exponent near -1/2") {
    const BathSpec spec = stats_spec(18);
    const std::vector<double> indices = {8.0, 16.0, 32.0, 64.0};
    const ScalingFit fit = scaling_fit(spec, drive_with_index(0.0), indices, 1200);
    CHECK(fit.slope > -0.65);
    CHECK(fit.slope < -0.35);
    CHECK(fit.ci_low < fit.slope);
    CHECK(fit.ci_high > fit.slope);
    REQUIRE(fit.sigmas.size() == 4);
    CHECK(fit.sigmas.back() < fit.sigmas.front());
}

TEST_CASE("scaling fit input validation") {
    const BathSpec spec = stats_spec(19);
    const DriveParams drive = drive_with_index(0.0);
    CHECK_THROWS_AS(scaling_fit(spec, drive, std::vector<double>{8.0, 8.0, 8.0}, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(scaling_fit(spec, drive, std::vector<double>{8.0, 16.0}, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(scaling_fit(spec, drive, std::vector<double>{0.5, 8.0}, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_stats(spec, drive, E0Policy{}, 1, RateMethod::Analytic),
                    std::invalid_argument);
}

TEST_CASE("low-frequency Lamb shift statistics") {
    // window centered at e0 = 40 lies inside (0, 2 e0): every TLS belongs to
    // the low-frequency part and the dispersive kernel is odd around e0
    BathSpec spec = stats_spec(23, 60);
    spec.center = 40.0;
    const DriveParams drive = drive_with_index(6.0);

    const int n = 3000;
    std::vector<double> shifts(n), rates(n);
    for (int k = 0; k < n; ++k) {
        BathSpec sub = spec;
        sub.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k), 0);
        const BathRealization bath = sample_bath(sub);
        DriveParams d = drive;
        d.e0 = spec.center;
        shifts[static_cast<std::size_t>(k)] = lamb_shift_low(d.e0, bath, d);
        rates[static_cast<std::size_t>(k)] = gamma_modulated(d.e0, bath, d);
    }
    double sm = 0.0, sr = 0.0;
    for (int k = 0; k < n; ++k) {
        sm += shifts[static_cast<std::size_t>(k)];
        sr += rates[static_cast<std::size_t>(k)];
    }
    sm /= n;
    sr /= n;
    double var_shift = 0.0, var_rate = 0.0;
    for (int k = 0; k < n; ++k) {
        var_shift += (shifts[static_cast<std::size_t>(k)] - sm) * (shifts[static_cast<std::size_t>(k)] - sm);
        var_rate += (rates[static_cast<std::size_t>(k)] - sr) * (rates[static_cast<std::size_t>(k)] - sr);
    }
    var_shift /= (n - 1);
    var_rate /= (n - 1);

    CHECK(std::abs(sm) < 3.0 * std::sqrt(var_shift / n));   // <shift> = 0
    CHECK(var_shift == doctest::Approx(0.25 * var_rate).epsilon(0.15));  // <shift^2> = Var(rate)/4
}

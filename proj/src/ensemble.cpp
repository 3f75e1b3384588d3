#include "qfm/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "qfm/fit.hpp"
#include "qfm/rng.hpp"
#include "qfm/specfun.hpp"

namespace qfm {

namespace {

// Moments of U[a, b], degenerate ranges included.
double uniform_second_moment(double a, double b) {
    return (a * a + a * b + b * b) / 3.0;
}

double uniform_fourth_moment(double a, double b) {
    if (a == b) return a * a * a * a;
    const double a5 = std::pow(a, 5), b5 = std::pow(b, 5);
    return (b5 - a5) / (5.0 * (b - a));
}

double uniform_inverse_moment(double a, double b) {
    if (a == b) return 1.0 / a;
    return std::log(b / a) / (b - a);
}

}  // namespace

double predicted_mean(const BathSpec& spec) {
    spec.validate();
    return M_PI * uniform_second_moment(spec.g_min, spec.g_max) / (2.0 * spec.spacing);
}

double predicted_variance(const BathSpec& spec, double modulation_index) {
    spec.validate();
    const double g4_over_gamma = uniform_fourth_moment(spec.g_min, spec.g_max) *
                                 uniform_inverse_moment(spec.gamma_min, spec.gamma_max);
    return (M_PI / (8.0 * spec.spacing)) * g4_over_gamma * bessel_quartic_sum(modulation_index);
}

double relative_std_static_typical(double spacing, double gamma_typ) {
    return std::sqrt(spacing / (2.0 * M_PI * gamma_typ));
}

EnsembleStats monte_carlo_stats(const BathSpec& spec, const DriveParams& drive_template,
                                const E0Policy& policy, int n_realizations, RateMethod estimator,
                                const IntegratorControls& controls, int n_threads) {
    spec.validate();
    if (n_realizations < 2)
        throw std::invalid_argument("monte_carlo_stats: need n_realizations >= 2");

    std::vector<double> rates(static_cast<std::size_t>(n_realizations), 0.0);
    std::vector<unsigned char> failed(static_cast<std::size_t>(n_realizations), 0);

    auto evaluate = [&](int k) {
        BathSpec sub = spec;
        sub.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(k), 0);
        const BathRealization bath = sample_bath(sub);

        DriveParams drive = drive_template;
        if (policy.kind == E0Policy::Kind::Fixed) {
            drive.e0 = policy.value;
        } else {
            Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(k), 1));
            drive.e0 = policy.value + (rng.next_double() - 0.5) * spec.spacing;
        }

        const std::size_t i = static_cast<std::size_t>(k);
        switch (estimator) {
            case RateMethod::Analytic:
                rates[i] = gamma_modulated(drive.e0, bath, drive);
                break;
            case RateMethod::Gamma099: {
                const Gamma099Result r = gamma_099(bath, drive, controls);
                if (r.crossed)
                    rates[i] = r.rate;
                else
                    failed[i] = 1;
                break;
            }
            case RateMethod::ExpFit:
                try {
                    rates[i] = estimate_rate_expfit(bath, drive, controls).rate;
                } catch (const FitRejected&) {
                    failed[i] = 1;
                } catch (const HorizonError&) {
                    failed[i] = 1;
                }
                break;
        }
    };

    if (n_threads <= 1) {
        for (int k = 0; k < n_realizations; ++k) evaluate(k);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int k = next.fetch_add(1);
                if (k >= n_realizations) return;
                evaluate(k);
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min(n_threads, n_realizations);
        pool.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int n_failed = 0;
    std::vector<double> good;
    good.reserve(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (failed[i])
            ++n_failed;
        else
            good.push_back(rates[i]);
    }
    if (n_failed > 0 && n_failed * 20 > n_realizations)
        throw EstimatorFailure("monte_carlo_stats: estimator failed on " +
                               std::to_string(n_failed) + " of " +
                               std::to_string(n_realizations) + " realizations (> 5%)");
    if (good.size() < 2) throw EstimatorFailure("monte_carlo_stats: fewer than 2 usable realizations");

    EnsembleStats stats;
    stats.n_realizations = static_cast<int>(good.size());
    stats.n_failed = n_failed;
    stats.estimator = estimator;
    stats.mean = pairwise_sum(good) / static_cast<double>(good.size());

    std::vector<double> centered_sq(good.size());
    for (std::size_t i = 0; i < good.size(); ++i) {
        const double d = good[i] - stats.mean;
        centered_sq[i] = d * d;
    }
    stats.variance = pairwise_sum(centered_sq) / (static_cast<double>(good.size()) - 1.0);
    stats.std_err_mean = std::sqrt(stats.variance / static_cast<double>(good.size()));
    return stats;
}

ScalingFit scaling_fit(const BathSpec& spec, const DriveParams& drive_template,
                       std::span<const double> index_list, int n_realizations, int n_threads) {
    if (index_list.size() < 2) throw std::invalid_argument("scaling_fit: need >= 2 indices");
    double lo = index_list[0], hi = index_list[0];
    for (double x : index_list) {
        if (!(x >= 2.0)) throw std::invalid_argument("scaling_fit: indices must be >= 2 (A >> Omega)");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi / lo >= 8.0))
        throw std::invalid_argument("scaling_fit: indices must span at least a factor 8");

    ScalingFit fit;
    std::vector<double> lx, ls;
    for (double x : index_list) {
        DriveParams drive = drive_template;
        drive.amp = x * drive.omega;
        const EnsembleStats stats = monte_carlo_stats(spec, drive, E0Policy{}, n_realizations,
                                                      RateMethod::Analytic, {}, n_threads);
        fit.indices.push_back(x);
        fit.sigmas.push_back(std::sqrt(stats.variance));
        lx.push_back(std::log(x));
        ls.push_back(0.5 * std::log(stats.variance));
    }

    const LinearFit lf = linear_fit(lx, ls);
    fit.slope = lf.slope;
    // 95% CI from the residual-based slope standard error (t quantile for the
    // small fixed point counts used here).
    static const double t975[] = {12.71, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306};
    const std::size_t df = lf.n - 2;
    const double t = (df == 0) ? 12.71 : (df <= 8 ? t975[df - 1] : 2.0);
    fit.ci_low = lf.slope - t * lf.slope_stderr;
    fit.ci_high = lf.slope + t * lf.slope_stderr;
    return fit;
}

std::string stats_to_json(const EnsembleStats& stats, double amp_over_omega, std::uint64_t seed) {
    nlohmann::json j;
    j["n"] = stats.n_realizations;
    j["mean"] = stats.mean;
    j["variance"] = stats.variance;
    j["std_err"] = stats.std_err_mean;
    j["estimator"] = rate_method_name(stats.estimator);
    j["amp_over_omega"] = amp_over_omega;
    j["seed"] = seed;
    j["n_failed"] = stats.n_failed;
    return j.dump(2);
}

}  // namespace qfm

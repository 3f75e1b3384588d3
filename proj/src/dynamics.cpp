#include "qfm/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "qfm/fit.hpp"
#include "qfm/rk4.hpp"

namespace qfm {

namespace {

constexpr double kCrossingLevel = 0.99;
constexpr double kPopulationSlack = 1e-8;

// Right-hand side of the amplitude equations.  State layout: y[0] = a,
// y[1 + n] = b_n.  For equispaced splittings the per-TLS phasors
// e^{-i eps_n t} are generated by a unit-modulus recurrence (2 sincos per
// evaluation instead of one per TLS).
class AmplitudeRhs {
  public:
    AmplitudeRhs(const BathRealization& bath, const DriveParams& drive)
        : drive_(drive), n_(bath.size()) {
        g_.reserve(n_);
        gamma_.reserve(n_);
        eps_.reserve(n_);
        for (const auto& t : bath.tls) {
            g_.push_back(t.g);
            gamma_.push_back(t.gamma);
            eps_.push_back(t.epsilon);
        }
        equispaced_ = n_ >= 2;
        if (n_ >= 2) {
            spacing_ = eps_[1] - eps_[0];
            for (std::size_t i = 1; i + 1 < eps_.size(); ++i) {
                if (std::abs((eps_[i + 1] - eps_[i]) - spacing_) > 1e-12 * std::max(1.0, std::abs(spacing_))) {
                    equispaced_ = false;
                    break;
                }
            }
        }
    }

    void operator()(double t, const cvector& y, cvector& dy) const {
        const double phi = drive_.phase(t);
        const std::complex<double> a = y[0];
        std::complex<double> acc{0.0, 0.0};

        if (equispaced_) {
            // e^{i[(e0 - eps_n) t + phi]} = w * q^n with |q| = 1
            std::complex<double> u = std::polar(1.0, (drive_.e0 - eps_[0]) * t + phi);
            const std::complex<double> q = std::polar(1.0, -spacing_ * t);
            for (std::size_t n = 0; n < static_cast<std::size_t>(n_); ++n) {
                const std::complex<double> bn = y[1 + n];
                dy[1 + n] = std::complex<double>(0.0, -0.5 * g_[n]) * (std::conj(u) * a) - gamma_[n] * bn;
                acc += g_[n] * (u * bn);
                u *= q;
            }
        } else {
            for (std::size_t n = 0; n < static_cast<std::size_t>(n_); ++n) {
                const std::complex<double> u = std::polar(1.0, (drive_.e0 - eps_[n]) * t + phi);
                const std::complex<double> bn = y[1 + n];
                dy[1 + n] = std::complex<double>(0.0, -0.5 * g_[n]) * (std::conj(u) * a) - gamma_[n] * bn;
                acc += g_[n] * (u * bn);
            }
        }
        dy[0] = std::complex<double>(0.0, -0.5) * acc;
    }

  private:
    DriveParams drive_;
    int n_;
    std::vector<double> g_, gamma_, eps_;
    bool equispaced_ = false;
    double spacing_ = 0.0;
};

double population_of(const cvector& y) {
    double p = 0.0;
    for (const auto& z : y) p += std::norm(z);
    return p;
}

double effective_dt(const BathRealization& bath, const DriveParams& drive,
                    const IntegratorControls& controls) {
    if (controls.dt > 0.0) return controls.dt;
    return auto_dt(bath, drive);
}

// Runs the stepper with a population-monotonicity guard wrapped around the
// caller's observer.
template <typename Observer>
void run_integration(const BathRealization& bath, const DriveParams& drive,
                     const IntegratorControls& controls, double t_end, Observer&& observer) {
    if (bath.tls.empty()) throw std::invalid_argument("integrate: bath must be non-empty");
    drive.validate();
    for (const auto& t : bath.tls) t.validate();

    AmplitudeRhs rhs(bath, drive);
    cvector y(1 + static_cast<std::size_t>(bath.size()), {0.0, 0.0});
    y[0] = {1.0, 0.0};

    double p_prev = 1.0;
    auto guarded = [&](double t, const cvector& state) -> bool {
        const double p = population_of(state);
        if (p > p_prev * (1.0 + kPopulationSlack) + 1e-12) {
            throw StepSizeError("integrate: population grew at t = " + std::to_string(t) +
                                " (step too coarse)");
        }
        p_prev = p;
        return observer(t, state, p);
    };

    const double dt = effective_dt(bath, drive, controls);
    if (controls.scheme == Scheme::Adaptive) {
        rk4_adaptive(rhs, y, 0.0, t_end, dt, controls.rtol, controls.atol, guarded);
    } else {
        rk4_fixed(rhs, y, 0.0, t_end, dt, guarded);
    }
}

}  // namespace

double auto_dt(const BathRealization& bath, const DriveParams& drive) {
    double f_max = drive.omega;
    f_max = std::max(f_max, drive.amp);
    f_max = std::max(f_max, bath.gamma_max());
    f_max = std::max(f_max, bath.g_max());
    for (const auto& t : bath.tls)
        f_max = std::max(f_max, std::abs(drive.e0 - t.epsilon) + drive.amp);
    return 2.0 * M_PI / (50.0 * f_max);
}

AmplitudeTrajectory integrate(const BathRealization& bath, const DriveParams& drive,
                              const IntegratorControls& controls) {
    AmplitudeTrajectory traj;
    traj.n_tls = bath.size();
    traj.bath_fingerprint = bath.spec_fingerprint;
    traj.drive = drive;

    double record_dt = controls.record_dt;
    if (record_dt <= 0.0) record_dt = controls.t_max / 4000.0;

    double next_record = 0.0;
    run_integration(bath, drive, controls, controls.t_max,
                    [&](double t, const cvector& y, double p) {
                        if (t + 1e-12 >= next_record) {
                            traj.times.push_back(t);
                            traj.a.push_back(y[0]);
                            traj.population.push_back(p);
                            if (controls.record_b)
                                traj.b.insert(traj.b.end(), y.begin() + 1, y.end());
                            next_record += record_dt;
                        }
                        return true;
                    });
    return traj;
}

Gamma099Result gamma_099(const BathRealization& bath, const DriveParams& drive,
                         const IntegratorControls& controls) {
    Gamma099Result result;
    double t_prev = 0.0;
    double abs_prev = 1.0;
    run_integration(bath, drive, controls, controls.t_max,
                    [&](double t, const cvector& y, double) {
                        const double abs_a = std::abs(y[0]);
                        if (abs_a < kCrossingLevel) {
                            const double frac = (abs_prev - kCrossingLevel) / (abs_prev - abs_a);
                            result.t_cross = t_prev + frac * (t - t_prev);
                            result.rate = 1.0 / result.t_cross;
                            result.crossed = true;
                            return false;
                        }
                        t_prev = t;
                        abs_prev = abs_a;
                        return true;
                    });
    return result;
}

double gamma_expfit(const AmplitudeTrajectory& traj, double t1, double t2) {
    if (traj.size() < 2) throw std::invalid_argument("gamma_expfit: empty trajectory");
    std::vector<double> mags(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) mags[i] = std::abs(traj.a[i]);
    return exp_fit_rate(traj.times, mags, t1, t2);
}

ExpFitEstimate estimate_rate_expfit(const BathRealization& bath, const DriveParams& drive,
                                    const IntegratorControls& controls, double min_log_drop) {
    // Window start: after the bath memory transient (few 1/gamma of the
    // slowest TLS), but never past a third of the horizon.
    const double t1 = std::min(12.0 / bath.gamma_min(), controls.t_max / 3.0);

    std::vector<double> times, mags;
    double record_dt = controls.record_dt;
    if (record_dt <= 0.0) record_dt = std::max(t1 / 400.0, controls.t_max / 200000.0);

    double next_record = 0.0;
    double log_at_t1 = 0.0;
    bool have_t1 = false;

    run_integration(bath, drive, controls, controls.t_max,
                    [&](double t, const cvector& y, double) {
                        if (t + 1e-12 < next_record) return true;
                        next_record += record_dt;
                        const double abs_a = std::abs(y[0]);
                        times.push_back(t);
                        mags.push_back(abs_a);
                        if (!have_t1 && t >= t1) {
                            log_at_t1 = 2.0 * std::log(abs_a);
                            have_t1 = true;
                        }
                        if (have_t1 && t > t1) {
                            const double drop = log_at_t1 - 2.0 * std::log(abs_a);
                            if (drop >= min_log_drop) return false;
                        }
                        return true;
                    });

    if (!have_t1) throw HorizonError("estimate_rate_expfit: horizon shorter than the fit window start");

    ExpFitEstimate est;
    est.t_window_begin = t1;
    est.t_window_end = times.back();
    est.rate = exp_fit_rate(times, mags, t1, times.back());
    return est;
}

RateCurve rate_curve(const BathRealization& bath, const DriveParams& drive_template,
                     std::span<const double> e0_grid, RateMethod method,
                     const IntegratorControls& controls, int n_threads) {
    if (e0_grid.size() >= 2) {
        for (std::size_t i = 1; i < e0_grid.size(); ++i)
            if (!(e0_grid[i] > e0_grid[i - 1]))
                throw std::invalid_argument("rate_curve: grid must be strictly increasing");
    }

    RateCurve curve;
    curve.e0_grid.assign(e0_grid.begin(), e0_grid.end());
    curve.rates.assign(e0_grid.size(), 0.0);
    curve.flags.assign(e0_grid.size(), PointFlag::Ok);
    curve.method = method;
    curve.amp = drive_template.amp;
    curve.omega = drive_template.omega;
    curve.bath_fingerprint = bath.spec_fingerprint;

    auto evaluate = [&](std::size_t i) {
        DriveParams drive = drive_template;
        drive.e0 = e0_grid[i];
        switch (method) {
            case RateMethod::Analytic:
                curve.rates[i] = gamma_modulated(drive.e0, bath, drive);
                break;
            case RateMethod::Gamma099: {
                const Gamma099Result r = gamma_099(bath, drive, controls);
                curve.rates[i] = r.rate;
                if (!r.crossed) curve.flags[i] = PointFlag::NoCrossing;
                break;
            }
            case RateMethod::ExpFit:
                try {
                    curve.rates[i] = estimate_rate_expfit(bath, drive, controls).rate;
                } catch (const FitRejected&) {
                    curve.rates[i] = 0.0;
                    curve.flags[i] = PointFlag::FitRejected;
                }
                break;
        }
    };

    if (n_threads <= 1 || e0_grid.size() < 2) {
        for (std::size_t i = 0; i < e0_grid.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= e0_grid.size()) return;
                evaluate(i);
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(n_threads, static_cast<int>(e0_grid.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return curve;
}

void trajectory_to_csv(const AmplitudeTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("trajectory_to_csv: cannot open " + path);
    out << "t,re_a,im_a,abs_a,population\n";
    char line[256];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[i],
                      traj.a[i].real(), traj.a[i].imag(), std::abs(traj.a[i]), traj.population[i]);
        out << line;
    }
}

}  // namespace qfm

// fit.hpp — least-squares helpers shared by the rate extractors.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfm {

// Thrown when a decay fit is requested on data that is not a decay
// (oscillatory strong-coupling windows, flat signals, regrowth).
struct FitRejected : std::runtime_error {
    explicit FitRejected(const std::string& why) : std::runtime_error(why) {}
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
    std::size_t n = 0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Rejects if block means of `values` rise by more than rel_slack between
// consecutive blocks (oscillation / regrowth detector on top of smooth decay).
void require_non_increasing_blocks(std::span<const double> values, int n_blocks,
                                   double rel_slack, const std::string& what);

// Decay rate of values^2 from a log-linear fit over [t1, t2]:
// values are amplitude magnitudes sampled at `times`; returns -slope of
// ln(values^2).  Throws FitRejected on non-monotone windows; `rel_slack` is
// the tolerated block-mean rise (small ripple on top of the decay is fine,
// strong-coupling oscillations are not).
double exp_fit_rate(std::span<const double> times, std::span<const double> values,
                    double t1, double t2, double rel_slack = 3e-3);

// Numerically stable summation with a fixed, thread-count-independent order.
double pairwise_sum(std::span<const double> values);

}  // namespace qfm

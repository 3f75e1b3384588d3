#include "qfm/fit.hpp"

#include <algorithm>
#include <cmath>

namespace qfm {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("linear_fit: need at least 2 points");

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");

    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
    if (n > 2) fit.slope_stderr = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
    return fit;
}

void require_non_increasing_blocks(std::span<const double> values, int n_blocks,
                                   double rel_slack, const std::string& what) {
    if (values.size() < static_cast<std::size_t>(2 * n_blocks)) n_blocks = 2;
    const std::size_t block = values.size() / static_cast<std::size_t>(n_blocks);
    if (block == 0) throw FitRejected(what + ": too few samples");

    double prev = 0.0;
    bool have_prev = false;
    for (int b = 0; b < n_blocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = (b == n_blocks - 1) ? values.size() : lo + block;
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += values[i];
        mean /= static_cast<double>(hi - lo);
        if (have_prev && mean > prev * (1.0 + rel_slack) + 1e-12) {
            throw FitRejected(what + ": non-monotone window (block mean rose from " +
                              std::to_string(prev) + " to " + std::to_string(mean) + ")");
        }
        prev = mean;
        have_prev = true;
    }
}

double exp_fit_rate(std::span<const double> times, std::span<const double> values,
                    double t1, double t2, double rel_slack) {
    if (times.size() != values.size()) throw std::invalid_argument("exp_fit_rate: size mismatch");
    if (!(t1 < t2)) throw std::invalid_argument("exp_fit_rate: need t1 < t2");

    std::vector<double> ts, ys, mags;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t1 || times[i] > t2) continue;
        if (!(values[i] > 0.0)) throw FitRejected("exp_fit_rate: non-positive amplitude in window");
        ts.push_back(times[i]);
        mags.push_back(values[i]);
        ys.push_back(2.0 * std::log(values[i]));
    }
    if (ts.size() < 8) throw std::invalid_argument("exp_fit_rate: fewer than 8 samples in window");

    require_non_increasing_blocks(mags, 16, rel_slack, "exp_fit_rate");
    return -linear_fit(ts, ys).slope;
}

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace qfm

// ensemble.hpp — disorder statistics of the relaxation rate over bath
// realizations: the modulation-independent mean pi <g^2> / (2 Delta), the
// variance (pi / 8 Delta) <g^4/gamma> sum_m J_m^4(A/Omega), and the
// sqrt(Omega/A) suppression of the spread under strong modulation.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/analytic.hpp"
#include "qfm/bath.hpp"
#include "qfm/dynamics.hpp"

namespace qfm {

struct EstimatorFailure : std::runtime_error {
    explicit EstimatorFailure(const std::string& why) : std::runtime_error(why) {}
};

struct EnsembleStats {
    int n_realizations = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n-1)
    double std_err_mean = 0.0;
    RateMethod estimator = RateMethod::Analytic;
    int n_failed = 0;
};

// Where to evaluate the rate for each realization.
struct E0Policy {
    enum class Kind { Fixed, UniformOverSpacing } kind = Kind::UniformOverSpacing;
    double value = 0.0;  // fixed e0, or the center of the one-spacing window
};

// pi <g^2> / (2 Delta) with <g^2> the uniform-range second moment; the
// derivation assumes uniform-random splittings over the window.
double predicted_mean(const BathSpec& spec);

// (pi / 8 Delta) <g^4/gamma> sum_m J_m^4(A/Omega), closed-form moments of the
// uniform ranges.
double predicted_variance(const BathSpec& spec, double modulation_index);

// Relative spread of the undriven rate with g, gamma replaced by typical
// values: sqrt(Delta / (2 pi gamma_typ)).
double relative_std_static_typical(double spacing, double gamma_typ);

// Samples n baths with substream seeds derived from spec.seed, evaluates the
// rate per realization, and accumulates by deterministic pairwise reduction
// (results independent of thread count).  Estimator failures are counted;
// more than 5% aborts with EstimatorFailure.
EnsembleStats monte_carlo_stats(const BathSpec& spec, const DriveParams& drive_template,
                                const E0Policy& policy, int n_realizations, RateMethod estimator,
                                const IntegratorControls& controls = {}, int n_threads = 1);

struct ScalingFit {
    double slope = 0.0;
    double ci_low = 0.0;   // 95% confidence interval on the slope
    double ci_high = 0.0;
    std::vector<double> indices;
    std::vector<double> sigmas;
};

// Ordinary least squares of ln sigma against ln(A/Omega) over the given
// modulation indices (all >= 2, spanning at least a factor 8).
ScalingFit scaling_fit(const BathSpec& spec, const DriveParams& drive_template,
                       std::span<const double> index_list, int n_realizations,
                       int n_threads = 1);

std::string stats_to_json(const EnsembleStats& stats, double amp_over_omega, std::uint64_t seed);

}  // namespace qfm

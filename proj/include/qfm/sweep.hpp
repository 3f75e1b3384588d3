// sweep.hpp — configuration ingestion, sweep orchestration, and result
// persistence for the CLI.  One JSON config describes a run; outputs are
// CSV/JSON files plus a manifest (config echo + seed + code version) that can
// be replayed to reproduce every byte.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/analytic.hpp"
#include "qfm/bath.hpp"
#include "qfm/dynamics.hpp"
#include "qfm/ensemble.hpp"

namespace qfm {

inline constexpr const char* kCodeVersion = "qfm 0.1.0";

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& why) : std::runtime_error(why) {}
};

enum class SweepMode { RateCurve, Ensemble, Scaling, Rabi, PhononOracle };

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    std::vector<double> points() const;
};

// Optional strongly coupled TLS inserted into an equispaced weak grid.
struct StrongInsert {
    bool enabled = false;
    double g = 0.0;
    double gamma = 0.0;
    int position_index = 0;
};

struct RabiOpts {
    double e0 = 25.0;
    double omega_r = 0.02;
    std::vector<std::pair<int, double>> cases;  // (m, amp_over_omega)
    double horizon = 0.0;                       // 0 = derive from omega_r
    int recovery_order = -1;                    // >= 0 enables the multi-harmonic run
    double recovery_index = 0.0;
};

struct PhononOpts {
    double center = 0.0;
    double half_width = 0.0;
    double mode_spacing = 0.0;
    double coupling = 0.0;
    double epsilon = 0.0;
    double horizon = 0.0;
};

struct TrajectoryDump {
    bool enabled = false;
    double e0 = 0.0;
    double amp_over_omega = 0.0;
    double t_max = 0.0;
};

struct SweepConfig {
    SweepMode mode = SweepMode::RateCurve;
    std::uint64_t seed = 0;
    int threads = 1;

    BathSpec bath;
    StrongInsert strong;
    double omega = 1.0;
    std::vector<double> amps;  // amp_over_omega values

    GridSpec e0_grid;
    RateMethod method = RateMethod::Analytic;
    IntegratorControls integrator;
    int n_realizations = 1;

    E0Policy e0_policy;
    std::vector<double> scaling_indices;

    RabiOpts rabi;
    PhononOpts phonon;
    TrajectoryDump dump;
};

// Parses a config document (or a manifest, whose embedded "config" object is
// used for replay).  Throws ConfigError on malformed or invalid input.
SweepConfig parse_config(const std::string& json_text);

struct RunOutputs {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// Executes the configured sweep into out_dir (created if needed) and writes
// the manifest.  Output bytes depend only on (config, seed), never on the
// worker count.
RunOutputs run_sweep(const SweepConfig& config, const std::string& out_dir);

// Gnuplot script rendering for a result set; throws on empty or malformed
// results.
void emit_plot_script(SweepMode mode, const std::string& csv_path,
                      const std::vector<double>& amps, const std::string& script_path);

}  // namespace qfm

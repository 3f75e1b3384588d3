#include "qfm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "qfm/csv.hpp"
#include "qfm/gates.hpp"
#include "qfm/phonon.hpp"
#include "qfm/rng.hpp"
#include "qfm/specfun.hpp"

namespace qfm {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> GridSpec::points() const {
    if (count < 2) throw ConfigError("e0_grid: count must be >= 2");
    if (!(stop > start)) throw ConfigError("e0_grid: stop must be > start");
    std::vector<double> pts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        pts[static_cast<std::size_t>(i)] =
            start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return pts;
}

namespace {

std::string canonical_dump(const json& j) { return j.dump(2); }

SweepMode mode_from_name(const std::string& name) {
    if (name == "rate-curve") return SweepMode::RateCurve;
    if (name == "ensemble") return SweepMode::Ensemble;
    if (name == "scaling") return SweepMode::Scaling;
    if (name == "rabi") return SweepMode::Rabi;
    if (name == "phonon-oracle") return SweepMode::PhononOracle;
    throw ConfigError("unknown mode: " + name);
}

BathSpec parse_bath(const json& j, std::uint64_t seed) {
    BathSpec spec;
    spec.n_tls = j.at("n_tls").get<int>();
    spec.spacing = j.at("spacing").get<double>();
    const std::string layout = j.value("layout", std::string("equispaced"));
    if (layout == "equispaced")
        spec.layout = EpsilonLayout::Equispaced;
    else if (layout == "uniform-random")
        spec.layout = EpsilonLayout::UniformRandom;
    else
        throw ConfigError("bath.layout must be 'equispaced' or 'uniform-random'");
    spec.g_min = j.at("g_range")[0].get<double>();
    spec.g_max = j.at("g_range")[1].get<double>();
    spec.gamma_min = j.at("gamma_range")[0].get<double>();
    spec.gamma_max = j.at("gamma_range")[1].get<double>();
    spec.center = j.value("center", 0.0);
    spec.seed = seed;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

}  // namespace

SweepConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    if (j.contains("config")) j = j["config"];  // manifest replay

    SweepConfig cfg;
    try {
        cfg.mode = mode_from_name(j.at("mode").get<std::string>());
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.threads = j.value("threads", 1);
        if (cfg.threads < 1) throw ConfigError("threads must be >= 1");

        if (j.contains("drive")) {
            cfg.omega = j["drive"].value("omega", 1.0);
            if (!(cfg.omega > 0.0)) throw ConfigError("drive.omega must be > 0");
            if (j["drive"].contains("amp_over_omega"))
                cfg.amps = j["drive"]["amp_over_omega"].get<std::vector<double>>();
        }

        const bool needs_bath = cfg.mode == SweepMode::RateCurve || cfg.mode == SweepMode::Ensemble ||
                                cfg.mode == SweepMode::Scaling;
        if (needs_bath) cfg.bath = parse_bath(j.at("bath"), cfg.seed);

        if (needs_bath && j["bath"].contains("strong")) {
            const auto& s = j["bath"]["strong"];
            cfg.strong.enabled = true;
            cfg.strong.g = s.at("g").get<double>();
            cfg.strong.gamma = s.at("gamma").get<double>();
            cfg.strong.position_index = s.at("position_index").get<int>();
        }

        if (j.contains("integrator")) {
            const auto& s = j["integrator"];
            cfg.integrator.dt = s.value("dt", 0.0);
            cfg.integrator.t_max = s.value("t_max", 5000.0);
            cfg.integrator.record_dt = s.value("record_dt", 0.0);
            const std::string scheme = s.value("scheme", std::string("rk4-fixed"));
            if (scheme == "rk4-fixed")
                cfg.integrator.scheme = Scheme::Rk4Fixed;
            else if (scheme == "adaptive")
                cfg.integrator.scheme = Scheme::Adaptive;
            else
                throw ConfigError("integrator.scheme must be 'rk4-fixed' or 'adaptive'");
        }

        switch (cfg.mode) {
            case SweepMode::RateCurve: {
                const auto& g = j.at("e0_grid");
                cfg.e0_grid.start = g.at("start").get<double>();
                cfg.e0_grid.stop = g.at("stop").get<double>();
                cfg.e0_grid.count = g.at("count").get<int>();
                if (cfg.e0_grid.count < 2) throw ConfigError("e0_grid.count must be >= 2 in rate-curve mode");
                cfg.method = rate_method_from_name(j.at("method").get<std::string>());
                cfg.n_realizations = j.value("n_realizations", 1);
                if (cfg.n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
                if (cfg.amps.empty()) throw ConfigError("rate-curve mode needs drive.amp_over_omega");
                if (j.contains("dump_trajectory")) {
                    const auto& d = j["dump_trajectory"];
                    cfg.dump.enabled = true;
                    cfg.dump.e0 = d.at("e0").get<double>();
                    cfg.dump.amp_over_omega = d.at("amp_over_omega").get<double>();
                    cfg.dump.t_max = d.value("t_max", cfg.integrator.t_max);
                }
                break;
            }
            case SweepMode::Ensemble: {
                cfg.n_realizations = j.at("n_realizations").get<int>();
                if (cfg.n_realizations < 2) throw ConfigError("ensemble mode needs n_realizations >= 2");
                cfg.method = rate_method_from_name(j.value("method", std::string("analytic")));
                if (cfg.amps.empty()) throw ConfigError("ensemble mode needs drive.amp_over_omega");
                if (j.contains("e0_policy")) {
                    const auto& p = j["e0_policy"];
                    if (p.is_number()) {
                        cfg.e0_policy.kind = E0Policy::Kind::Fixed;
                        cfg.e0_policy.value = p.get<double>();
                    } else if (p.is_string() && p.get<std::string>() == "uniform-spacing") {
                        cfg.e0_policy.kind = E0Policy::Kind::UniformOverSpacing;
                        cfg.e0_policy.value = cfg.bath.center;
                    } else {
                        throw ConfigError("e0_policy must be a number or 'uniform-spacing'");
                    }
                } else {
                    cfg.e0_policy.value = cfg.bath.center;
                }
                break;
            }
            case SweepMode::Scaling: {
                cfg.scaling_indices = j.at("scaling").at("indices").get<std::vector<double>>();
                cfg.n_realizations = j.at("n_realizations").get<int>();
                cfg.e0_policy.value = cfg.bath.center;
                break;
            }
            case SweepMode::Rabi: {
                const auto& r = j.at("rabi");
                cfg.rabi.e0 = r.at("e0").get<double>();
                cfg.rabi.omega_r = r.at("omega_r").get<double>();
                if (!(cfg.rabi.omega_r > 0.0)) throw ConfigError("rabi.omega_r must be > 0");
                for (const auto& c : r.at("cases"))
                    cfg.rabi.cases.emplace_back(c.at("m").get<int>(),
                                                c.at("amp_over_omega").get<double>());
                cfg.rabi.horizon = r.value("horizon", 0.0);
                if (r.contains("recovery")) {
                    cfg.rabi.recovery_order = r["recovery"].at("order").get<int>();
                    cfg.rabi.recovery_index = r["recovery"].at("amp_over_omega").get<double>();
                }
                break;
            }
            case SweepMode::PhononOracle: {
                const auto& p = j.at("phonon");
                cfg.phonon.center = p.at("center").get<double>();
                cfg.phonon.half_width = p.at("half_width").get<double>();
                cfg.phonon.mode_spacing = p.at("mode_spacing").get<double>();
                cfg.phonon.coupling = p.at("coupling").get<double>();
                cfg.phonon.epsilon = p.at("epsilon").get<double>();
                cfg.phonon.horizon = p.at("horizon").get<double>();
                break;
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

namespace {

json config_to_json(const SweepConfig& cfg) {
    json j;
    switch (cfg.mode) {
        case SweepMode::RateCurve: j["mode"] = "rate-curve"; break;
        case SweepMode::Ensemble: j["mode"] = "ensemble"; break;
        case SweepMode::Scaling: j["mode"] = "scaling"; break;
        case SweepMode::Rabi: j["mode"] = "rabi"; break;
        case SweepMode::PhononOracle: j["mode"] = "phonon-oracle"; break;
    }
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["drive"] = {{"omega", cfg.omega}, {"amp_over_omega", cfg.amps}};

    const bool needs_bath = cfg.mode == SweepMode::RateCurve || cfg.mode == SweepMode::Ensemble ||
                            cfg.mode == SweepMode::Scaling;
    if (needs_bath) {
        j["bath"] = {
            {"n_tls", cfg.bath.n_tls},
            {"spacing", cfg.bath.spacing},
            {"layout", cfg.bath.layout == EpsilonLayout::Equispaced ? "equispaced" : "uniform-random"},
            {"g_range", {cfg.bath.g_min, cfg.bath.g_max}},
            {"gamma_range", {cfg.bath.gamma_min, cfg.bath.gamma_max}},
            {"center", cfg.bath.center},
        };
        if (cfg.strong.enabled)
            j["bath"]["strong"] = {{"g", cfg.strong.g},
                                   {"gamma", cfg.strong.gamma},
                                   {"position_index", cfg.strong.position_index}};
    }

    j["integrator"] = {
        {"dt", cfg.integrator.dt},
        {"t_max", cfg.integrator.t_max},
        {"record_dt", cfg.integrator.record_dt},
        {"scheme", cfg.integrator.scheme == Scheme::Rk4Fixed ? "rk4-fixed" : "adaptive"},
    };

    switch (cfg.mode) {
        case SweepMode::RateCurve:
            j["e0_grid"] = {{"start", cfg.e0_grid.start},
                            {"stop", cfg.e0_grid.stop},
                            {"count", cfg.e0_grid.count}};
            j["method"] = rate_method_name(cfg.method);
            j["n_realizations"] = cfg.n_realizations;
            if (cfg.dump.enabled)
                j["dump_trajectory"] = {{"e0", cfg.dump.e0},
                                        {"amp_over_omega", cfg.dump.amp_over_omega},
                                        {"t_max", cfg.dump.t_max}};
            break;
        case SweepMode::Ensemble:
            j["method"] = rate_method_name(cfg.method);
            j["n_realizations"] = cfg.n_realizations;
            if (cfg.e0_policy.kind == E0Policy::Kind::Fixed)
                j["e0_policy"] = cfg.e0_policy.value;
            else
                j["e0_policy"] = "uniform-spacing";
            break;
        case SweepMode::Scaling:
            j["scaling"] = {{"indices", cfg.scaling_indices}};
            j["n_realizations"] = cfg.n_realizations;
            break;
        case SweepMode::Rabi: {
            json cases = json::array();
            for (const auto& [m, x] : cfg.rabi.cases)
                cases.push_back({{"m", m}, {"amp_over_omega", x}});
            j["rabi"] = {{"e0", cfg.rabi.e0},
                         {"omega_r", cfg.rabi.omega_r},
                         {"cases", cases},
                         {"horizon", cfg.rabi.horizon}};
            if (cfg.rabi.recovery_order >= 0)
                j["rabi"]["recovery"] = {{"order", cfg.rabi.recovery_order},
                                         {"amp_over_omega", cfg.rabi.recovery_index}};
            break;
        }
        case SweepMode::PhononOracle:
            j["phonon"] = {{"center", cfg.phonon.center},
                           {"half_width", cfg.phonon.half_width},
                           {"mode_spacing", cfg.phonon.mode_spacing},
                           {"coupling", cfg.phonon.coupling},
                           {"epsilon", cfg.phonon.epsilon},
                           {"horizon", cfg.phonon.horizon}};
            break;
    }
    return j;
}

BathRealization realization_for(const SweepConfig& cfg, int index) {
    BathSpec spec = cfg.bath;
    spec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index), 7);
    if (cfg.strong.enabled) {
        TlsParams strong;
        strong.g = cfg.strong.g;
        strong.gamma = cfg.strong.gamma;
        strong.epsilon = 0.0;  // taken from the grid slot
        return mixed_bath(spec, strong, cfg.strong.position_index);
    }
    return sample_bath(spec);
}

void run_rate_curve(const SweepConfig& cfg, const std::string& out_dir, RunOutputs& out) {
    const std::vector<double> grid = cfg.e0_grid.points();

    std::vector<BathRealization> baths;
    baths.reserve(static_cast<std::size_t>(cfg.n_realizations));
    for (int r = 0; r < cfg.n_realizations; ++r) baths.push_back(realization_for(cfg, r));

    std::vector<RateCsvRow> rows;
    rows.reserve(cfg.amps.size() * baths.size() * grid.size());
    for (double amp_idx : cfg.amps) {
        DriveParams drive;
        drive.omega = cfg.omega;
        drive.amp = amp_idx * cfg.omega;
        for (int r = 0; r < cfg.n_realizations; ++r) {
            const RateCurve curve = rate_curve(baths[static_cast<std::size_t>(r)], drive, grid,
                                               cfg.method, cfg.integrator, cfg.threads);
            int n_flagged = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (curve.flags[i] != PointFlag::Ok) ++n_flagged;
                rows.push_back({(grid[i] - cfg.bath.center) / cfg.omega,
                                curve.rates[i] / cfg.omega, rate_method_name(cfg.method), amp_idx,
                                r});
            }
            if (n_flagged > 0) {
                std::ostringstream w;
                w << "amp_over_omega=" << amp_idx << " realization=" << r << ": " << n_flagged
                  << " grid points flagged (no crossing or rejected fit), rate recorded as 0";
                out.warnings.push_back(w.str());
            }
        }
    }

    const std::string csv_path = out_dir + "/rate_curve.csv";
    write_rate_csv(csv_path, rows);
    out.files.push_back("rate_curve.csv");

    emit_plot_script(SweepMode::RateCurve, csv_path, cfg.amps, out_dir + "/plot.gp");
    out.files.push_back("plot.gp");

    if (cfg.dump.enabled) {
        DriveParams drive;
        drive.omega = cfg.omega;
        drive.amp = cfg.dump.amp_over_omega * cfg.omega;
        drive.e0 = cfg.dump.e0;
        IntegratorControls controls = cfg.integrator;
        if (cfg.dump.t_max > 0.0) controls.t_max = cfg.dump.t_max;
        trajectory_to_csv(integrate(baths.front(), drive, controls), out_dir + "/trajectory.csv");
        out.files.push_back("trajectory.csv");
    }
}

void run_ensemble(const SweepConfig& cfg, const std::string& out_dir, RunOutputs& out) {
    json arr = json::array();
    for (double amp_idx : cfg.amps) {
        DriveParams drive;
        drive.omega = cfg.omega;
        drive.amp = amp_idx * cfg.omega;
        const EnsembleStats stats = monte_carlo_stats(cfg.bath, drive, cfg.e0_policy,
                                                      cfg.n_realizations, cfg.method,
                                                      cfg.integrator, cfg.threads);
        arr.push_back(json::parse(stats_to_json(stats, amp_idx, cfg.seed)));
        if (stats.n_failed > 0) {
            std::ostringstream w;
            w << "amp_over_omega=" << amp_idx << ": " << stats.n_failed << " estimator failures";
            out.warnings.push_back(w.str());
        }
    }
    write_text_file(out_dir + "/ensemble_stats.json", canonical_dump(arr) + "\n");
    out.files.push_back("ensemble_stats.json");
}

void run_scaling(const SweepConfig& cfg, const std::string& out_dir, RunOutputs& out) {
    DriveParams drive;
    drive.omega = cfg.omega;
    const ScalingFit fit =
        scaling_fit(cfg.bath, drive, cfg.scaling_indices, cfg.n_realizations, cfg.threads);

    const std::string csv_path = out_dir + "/scaling.csv";
    write_scaling_csv(csv_path, fit.indices, fit.sigmas);
    out.files.push_back("scaling.csv");

    json j = {{"slope", fit.slope}, {"ci_low", fit.ci_low}, {"ci_high", fit.ci_high}};
    write_text_file(out_dir + "/scaling_fit.json", canonical_dump(j) + "\n");
    out.files.push_back("scaling_fit.json");

    // intercept of ln(sigma) = intercept + slope * ln(x) for the fitted line
    double ln_c = 0.0;
    if (!fit.indices.empty())
        ln_c = std::log(fit.sigmas.front()) - fit.slope * std::log(fit.indices.front());
    emit_plot_script(SweepMode::Scaling, csv_path, {fit.slope, ln_c}, out_dir + "/plot.gp");
    out.files.push_back("plot.gp");
}

void run_rabi(const SweepConfig& cfg, const std::string& out_dir, RunOutputs& out) {
    std::vector<RabiCsvRow> rows;
    for (const auto& [m, x] : cfg.rabi.cases) {
        DriveParams drive;
        drive.omega = cfg.omega;
        drive.amp = x * cfg.omega;
        drive.e0 = cfg.rabi.e0;

        RabiDrive rd;
        rd.omega_r = cfg.rabi.omega_r;
        rd.omega_d = cfg.rabi.e0 + m * cfg.omega;

        const double predicted = effective_rabi(m, x, cfg.rabi.omega_r);
        double horizon = cfg.rabi.horizon;
        if (horizon <= 0.0) {
            const double f = std::max(std::abs(predicted), 0.05 * cfg.rabi.omega_r);
            horizon = 1.4 * M_PI / f;
        }
        const RabiMeasurement meas = simulate_rabi(drive, rd, horizon);
        const double scale = std::max(std::abs(predicted), 0.02 * cfg.rabi.omega_r);
        rows.push_back({m, x, predicted, meas.frequency,
                        (meas.frequency - std::abs(predicted)) / scale});
        if (meas.frozen) {
            std::ostringstream w;
            w << "m=" << m << " amp_over_omega=" << x
              << ": frozen gate (no population transfer), measured frequency 0";
            out.warnings.push_back(w.str());
        }
    }
    write_rabi_csv(out_dir + "/rabi.csv", rows);
    out.files.push_back("rabi.csv");

    if (cfg.rabi.recovery_order >= 0) {
        DriveParams drive;
        drive.omega = cfg.omega;
        drive.amp = cfg.rabi.recovery_index * cfg.omega;
        drive.e0 = cfg.rabi.e0;
        const double horizon = cfg.rabi.horizon > 0.0 ? cfg.rabi.horizon
                                                      : 1.4 * M_PI / cfg.rabi.omega_r;
        const RabiMeasurement meas =
            multiharmonic_recovery(drive, cfg.rabi.omega_r, cfg.rabi.recovery_order, horizon);
        json j = {{"amp_over_omega", cfg.rabi.recovery_index},
                  {"order", cfg.rabi.recovery_order},
                  {"predicted", cfg.rabi.omega_r},
                  {"measured", meas.frequency},
                  {"rel_err", (meas.frequency - cfg.rabi.omega_r) / cfg.rabi.omega_r}};
        write_text_file(out_dir + "/rabi_recovery.json", canonical_dump(j) + "\n");
        out.files.push_back("rabi_recovery.json");
    }
}

void run_phonon(const SweepConfig& cfg, const std::string& out_dir, RunOutputs& out) {
    PhononBathSpec spec;
    spec.center = cfg.phonon.center;
    spec.half_width = cfg.phonon.half_width;
    spec.mode_spacing = cfg.phonon.mode_spacing;
    spec.coupling = cfg.phonon.coupling;

    const double gamma = golden_rule_rate(spec, cfg.phonon.epsilon);
    const ExplicitDecayResult sim = simulate_explicit(spec, cfg.phonon.epsilon, cfg.phonon.horizon);
    json j = {{"golden_rule_amplitude_rate", gamma},
              {"predicted_probability_rate", 2.0 * gamma},
              {"fitted_probability_rate", sim.fitted_rate},
              {"ratio", sim.fitted_rate / (2.0 * gamma)},
              {"norm_drift", sim.norm_drift},
              {"lamb_shift", sim.lamb_shift}};
    write_text_file(out_dir + "/phonon_oracle.json", canonical_dump(j) + "\n");
    out.files.push_back("phonon_oracle.json");
}

}  // namespace

RunOutputs run_sweep(const SweepConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunOutputs out;

    switch (cfg.mode) {
        case SweepMode::RateCurve: run_rate_curve(cfg, out_dir, out); break;
        case SweepMode::Ensemble: run_ensemble(cfg, out_dir, out); break;
        case SweepMode::Scaling: run_scaling(cfg, out_dir, out); break;
        case SweepMode::Rabi: run_rabi(cfg, out_dir, out); break;
        case SweepMode::PhononOracle: run_phonon(cfg, out_dir, out); break;
    }

    json manifest;
    manifest["code_version"] = kCodeVersion;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_to_json(cfg);
    manifest["outputs"] = out.files;
    manifest["warnings"] = out.warnings;
    write_text_file(out_dir + "/manifest.json", canonical_dump(manifest) + "\n");
    out.files.push_back("manifest.json");
    return out;
}

void emit_plot_script(SweepMode mode, const std::string& csv_path,
                      const std::vector<double>& amps, const std::string& script_path) {
    const std::string text = read_text_file(csv_path);
    const std::size_t eol = text.find('\n');
    if (eol == std::string::npos || eol + 1 >= text.size())
        throw std::runtime_error("emit_plot_script: empty results in " + csv_path);
    const std::string header = text.substr(0, eol);

    const std::string base = fs::path(csv_path).filename().string();
    std::ostringstream gp;
    gp << "# gnuplot script, generated alongside " << base << "\n";
    gp << "set datafile separator ','\n";

    if (mode == SweepMode::RateCurve) {
        if (header != kRateCsvHeader)
            throw std::runtime_error("emit_plot_script: missing columns in " + csv_path);
        if (amps.empty()) throw std::runtime_error("emit_plot_script: no modulation indices");
        gp << "set key top right\n"
           << "set logscale y\n"
           << "set xlabel 'E_0/Omega (relative to E*)'\n"
           << "set ylabel 'Gamma_{0.99}/Omega'\n"
           << "plot \\\n";
        for (std::size_t i = 0; i < amps.size(); ++i) {
            gp << "  '" << base << "' every ::1 using 1:($4==" << format_g17(amps[i])
               << " ? ($2>0?$2:1/0) : 1/0) with lines title 'A/Omega = " << amps[i] << "'";
            gp << (i + 1 < amps.size() ? ", \\\n" : "\n");
        }
    } else if (mode == SweepMode::Scaling) {
        if (header != "amp_over_omega,sigma_over_omega")
            throw std::runtime_error("emit_plot_script: missing columns in " + csv_path);
        if (amps.size() != 2) throw std::runtime_error("emit_plot_script: need {slope, intercept}");
        gp << "set logscale xy\n"
           << "set xlabel 'A/Omega'\n"
           << "set ylabel 'sigma(Gamma)/Omega'\n"
           << "plot '" << base << "' every ::1 using 1:2 with points pt 7 title 'measured', \\\n"
           << "  exp(" << format_g17(amps[1]) << ") * x**(" << format_g17(amps[0])
           << ") with lines title 'fit, slope " << amps[0] << "'\n";
    } else {
        throw std::runtime_error("emit_plot_script: no plot defined for this mode");
    }

    write_text_file(script_path, gp.str());
}

}  // namespace qfm

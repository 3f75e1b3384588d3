// qfm — relaxation of a frequency-modulated qubit in a two-level-defect bath.
//
// Usage:
//   qfm run --config CONFIG.json [--out DIR] [--seed N] [--threads N] [--method NAME]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfm/csv.hpp"
#include "qfm/dynamics.hpp"
#include "qfm/ensemble.hpp"
#include "qfm/fit.hpp"
#include "qfm/sweep.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qfm: relaxation-rate sweeps for a frequency-modulated qubit in a TLS bath"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "execute a sweep described by a JSON config");
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    int threads_override = 0;
    std::string method_override;

    run->add_option("--config", config_path, "config or manifest JSON")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    auto* seed_opt = run->add_option("--seed", seed_override, "override the config seed");
    run->add_option("--threads", threads_override, "override the worker count");
    run->add_option("--method", method_override, "override the rate method (analytic|gamma099|expfit)");

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    try {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(qfm::read_text_file(config_path));
        } catch (const nlohmann::json::exception& e) {
            throw qfm::ConfigError(std::string("config parse: ") + e.what());
        } catch (const std::runtime_error& e) {
            throw qfm::ConfigError(e.what());
        }
        nlohmann::json& cfg_json = doc.contains("config") ? doc["config"] : doc;
        if (have_seed) cfg_json["seed"] = seed_override;
        if (threads_override > 0) cfg_json["threads"] = threads_override;
        if (!method_override.empty()) cfg_json["method"] = method_override;

        const qfm::SweepConfig cfg = qfm::parse_config(cfg_json.dump());
        const qfm::RunOutputs outputs = qfm::run_sweep(cfg, out_dir);

        for (const auto& w : outputs.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << outputs.files.size() << " files to " << out_dir << ":\n";
        for (const auto& f : outputs.files) std::cout << "  " << f << "\n";
        return 0;
    } catch (const qfm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

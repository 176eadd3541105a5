// wavecontrol analyze|synthesize|verify|sweep --config <path> --out <dir>

#include <iostream>

#include <CLI11.hpp>

#include "wavecontrol/config.hpp"
#include "wavecontrol/errors.hpp"
#include "wavecontrol/pipeline.hpp"

namespace wc = wavecontrol;

int main(int argc, char** argv) {
    CLI::App app{"Boundary control of coupled wave systems"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::string method;
    unsigned seed = 0;
    bool force = false;

    for (const char* name : {"analyze", "synthesize", "verify", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "problem configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--method", method, "raw | edd | n2_sharp");
        sub->add_option("--seed", seed, "recorded in the report");
        sub->add_flag("--force", force, "synthesize even if the controllability conditions fail");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : wc::kExitBadInput;
    }

    const auto command = wc::parse_command(app.get_subcommands().front()->get_name());
    try {
        const wc::ProblemConfig cfg = wc::load_config(config_path);
        wc::RunOptions options;
        options.force = force;
        options.seed = seed;
        if (!method.empty()) {
            options.method = wc::parse_method(method);
            if (!options.method) throw wc::Error(wc::ErrorKind::BadInput, "unknown method '" + method + "'");
        }
        const wc::RunResult result = wc::run(*command, cfg, options);
        wc::write_artifacts(result, out_dir);
        auto doc = wc::report_to_json(result.report);
        doc["timings"] = wc::timings_to_json(result.report);
        std::cout << doc.dump(2) << "\n";
        if (!result.report.error.empty()) std::cerr << "error: " << result.report.error << "\n";
        return result.report.exit_code;
    } catch (const wc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == wc::ErrorKind::BadInput ? wc::kExitBadInput : wc::kExitNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wc::kExitBadInput;
    }
}

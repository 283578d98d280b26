// Command-line front end for the experiment harness.

#include <iostream>

#include <CLI11.hpp>

#include "fewbody/harness.hpp"

namespace {

// built-in config used when --config is not given, per subcommand
std::string default_config(const std::string& kind) {
    std::string text =
        "[experiment]\n"
        "kind = " + kind + "\n"
        "label = " + kind + "\n";
    if (kind == "calibrate")
        text +=
            "d = 1\ne_target = -0.125\n"
            "[potential]\nkind = gaussian\namplitude = 0.5641895835477563\n"
            "[sweep]\neps_start = 0.3\neps_count = 6\n"
            "[grid]\nbox = 10\nmax_points = 2048\n";
    else if (kind == "norm-sweep")
        text +=
            "d = 1\n"
            "[potential]\nkind = gaussian\n"
            "[sweep]\neps_start = 0.4\nz = 1\n"
            "[grid]\nbox = 8\nmax_points = 2048\n"
            "[fit]\nmodel = power\npredicted = 1\n";
    else if (kind == "rate-fit")
        text +=
            "N = 2\nd = 1\ntol = 1e-5\n"
            "[potential]\nkind = gaussian\n"
            "[schedule]\nkind = linear\ng = 1\n"
            "[sweep]\neps_start = 0.4\neps_count = 7\nz = 1\n"
            "[grid]\nbox = 6\nmax_points = 1024\n"
            "[fit]\nmodel = power\npredicted = 2\n";
    else if (kind == "kk-check")
        text +=
            "N = 2\nd = 1\ntol = 1e-4\n"
            "[potential]\nkind = gaussian\n"
            "[schedule]\nkind = constant\nc = 0.5\n"
            "[sweep]\neps_start = 0.5\nz = 1\n"
            "[grid]\nbox = 6\nn = 32\n";
    else if (kind == "verify")
        text += "instances = 50\n";
    else if (kind == "thomas-check")
        text +=
            "d = 3\ntol = 1e-6\n"
            "[potential]\nkind = coulombic_cutoff\n"
            "[schedule]\nkind = constant\nc = 2\n"
            "[sweep]\neps_start = 0.5\n"
            "[grid]\nbox = 4\nn = 24\n";
    return text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermionic few-body resolvent laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // let global flags appear after the subcommand

    std::string config_path, out_dir;
    int workers = 1;
    long long seed = -1;
    app.add_option("--config", config_path, "experiment config file (INI)")->check(CLI::ExistingFile);
    app.add_option("--workers", workers, "worker pool size")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_dir, "override the output directory");

    const char* kinds[] = {"calibrate", "norm-sweep", "rate-fit", "kk-check",
                           "verify", "thomas-check", "report"};
    for (const char* k : kinds) app.add_subcommand(k, std::string("run the ") + k + " experiment");

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        fewbody::ExperimentConfig cfg = config_path.empty()
                                            ? fewbody::parse_config(default_config(kind))
                                            : fewbody::load_config(config_path);
        cfg.kind = kind;  // the subcommand wins over the config's kind field
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        const fewbody::ExperimentOutcome out = fewbody::run_experiment(cfg, workers);
        std::cout << out.summary << "\n";
        for (const auto& a : out.artifacts) std::cout << "wrote " << a << "\n";
        return out.status;
    } catch (const fewbody::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

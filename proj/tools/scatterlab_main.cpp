// Command-line entry point. Every experiment is a subcommand over a flat
// key-value configuration; dotted --set overrides win over the config file.

#include <CLI11.hpp>

#include <cstdio>

#include "scatterlab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for a flat torus with two point scatterers"};
    app.require_subcommand(1);

    std::string config_path, out_dir, cache_dir, preset;
    double lambda_max = -1.0;
    int threads = -1;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--cache", cache_dir, "cache directory");
    app.add_option("--lambda-max", lambda_max, "spectrum lambda_max override");
    app.add_option("--preset", preset, "extension preset name");
    app.add_option("--threads", threads, "worker threads (0: hardware)");
    app.add_option("--set", overrides, "explicit key=value overrides")->take_all();

    for (const char* name : {"norms", "spectrum", "sieve", "equidist", "verify", "report"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        scatterlab::cli::Config cfg = config_path.empty()
                                          ? scatterlab::cli::Config()
                                          : scatterlab::cli::Config::from_file(config_path);
        if (!out_dir.empty()) cfg.set("out.dir", out_dir);
        if (!cache_dir.empty()) cfg.set("cache.dir", cache_dir);
        if (lambda_max > 0) cfg.set("spectrum.lambda_max", std::to_string(lambda_max));
        if (!preset.empty()) cfg.set("extension.preset", preset);
        if (threads >= 0) cfg.set("threads", std::to_string(threads));
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "--set expects key=value, got %s\n", kv.c_str());
                return 2;
            }
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return scatterlab::cli::run_subcommand(app.get_subcommands().front()->get_name(), cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

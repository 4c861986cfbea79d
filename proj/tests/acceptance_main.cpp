// Acceptance suite: one pass/fail line per criterion. Runs everything by
// default; --criterion N runs a single one (the ctest registration).

#include <cstdio>
#include <cstring>
#include <string>

#include "scatterlab/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
            ids.push_back(std::atoi(argv[++i]));
        } else if (!std::strcmp(argv[i], "--config") && i + 1 < argc) {
            config_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]... [--config PATH]\n", argv[0]);
            return 2;
        }
    }
    if (ids.empty()) ids = scatterlab::accept::all_criteria();

    scatterlab::cli::Config cfg = config_path.empty()
                                      ? scatterlab::cli::Config()
                                      : scatterlab::cli::Config::from_file(config_path);
    int failures = 0;
    for (const auto& r : scatterlab::accept::run(ids, cfg)) {
        std::printf("%s\n", scatterlab::accept::format_line(r).c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

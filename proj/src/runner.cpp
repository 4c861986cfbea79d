#include "scatterlab/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scatterlab/acceptance.hpp"
#include "scatterlab/equidist.hpp"
#include "scatterlab/verify.hpp"

namespace scatterlab::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string out_path(const Config& cfg, const std::string& name) {
    return (fs::path(cfg.get("out.dir")) / name).string();
}

}  // namespace

lattice::NormTable cached_norm_table(const Config& cfg, double X, const Rational& aspect_sq) {
    char name[128];
    std::snprintf(name, sizeof name, "norms_%.17g_%lld_%lld.csv", X,
                  static_cast<long long>(aspect_sq.num), static_cast<long long>(aspect_sq.den));
    const fs::path path = fs::path(cfg.get("cache.dir")) / name;
    if (fs::exists(path)) {
        try {
            return lattice::from_csv(read_file(path.string()), aspect_sq, X);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "cache: %s (recomputing)\n", e.what());
        }
    }
    const auto table = lattice::sieve_norms(X, aspect_sq);
    write_file(path.string(), lattice::to_csv(table));
    return table;
}

namespace {

int run_norms(const Config& cfg) {
    const auto geom = cfg.geometry();
    const double X = std::ceil(1.1 * std::max(cfg.get_double("experiment.lambda_max"),
                                    cfg.get_double("spectrum.lambda_max")));
    const auto table = cached_norm_table(cfg, X, geom.aspect_sq);
    std::printf("norms: %zu shells up to %.17g (aspect %lld/%lld)\n", table.size(), X,
                static_cast<long long>(geom.aspect_sq.num),
                static_cast<long long>(geom.aspect_sq.den));
    return 0;
}

int run_spectrum(const Config& cfg) {
    const auto geom = cfg.geometry();
    const auto ext = cfg.extension();
    const auto c = greens::deficiency_constants(geom, 1e6);
    const Eigen::Matrix2d T = greens::mixing_matrix(c);
    const double lmax = cfg.get_double("spectrum.lambda_max");
    // cutoff policy for secular work: R = max(configured, 1e4 * lambda)
    const double cutoff = std::max(cfg.solver_cutoff(), 1e4 * lmax);
    const auto sums = greens::SecularSums::build(geom, cutoff, std::max(1e4, 4.0 * lmax));
    const auto rep = scattering::spectrum_scan(lmax, sums, c, T,
                                               scattering::fixed_extension(ext),
                                               cfg.scan_options());
    write_file(out_path(cfg, "spectrum.jsonl"), scattering::to_jsonl(rep));
    std::printf("spectrum: %zu records up to %.17g; max new per gap %d; max |deficit| %d\n",
                rep.records.size(), lmax, rep.max_new_in_gap, rep.max_abs_deficit);
    if (rep.max_abs_deficit > 2) {
        std::printf("ASSERTION FAILED: counting deficit %d exceeds 2\n", rep.max_abs_deficit);
        return 1;
    }
    return 0;
}

int run_sieve(const Config& cfg) {
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const double X = cfg.get_double("experiment.lambda_max");
    const auto table = cached_norm_table(cfg, std::ceil(1.1 * X), geom.aspect_sq);
    const auto mids = sieve::gap_midpoints(table, 0.0, X);
    sieve::DensityOptions opt;
    opt.threads = cfg.scan_options().threads;
    opt.block_start = cfg.get_double("experiment.lambda_min");
    const auto rows = sieve::density_report(mids, X, geom, table, p, opt);
    write_file(out_path(cfg, "density.csv"), sieve::to_csv(rows));
    std::printf("sieve: %zu dyadic blocks written\n", rows.size());
    return 0;
}

int run_equidist(const Config& cfg) {
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const double lo = cfg.get_double("experiment.lambda_min");
    const double hi = cfg.get_double("experiment.lambda_max");
    const auto samples = static_cast<std::size_t>(cfg.get_int("experiment.samples"));
    const auto table = cached_norm_table(cfg, std::ceil(1.1 * hi), geom.aspect_sq);
    const unsigned threads = cfg.scan_options().threads;

    const auto mids = sieve::gap_midpoints(table, lo, hi);
    std::vector<char> keep(mids.size(), 0);
    parallel_for(mids.size(), threads, [&](std::size_t i) {
        keep[i] = sieve::in_lambda_infinity(mids[i], geom, table, p) ? 1 : 0;
    });
    std::vector<double> linf;
    for (std::size_t i = 0; i < mids.size(); ++i)
        if (keep[i]) linf.push_back(mids[i]);
    std::vector<double> chosen;
    if (linf.size() <= samples) chosen = linf;
    else
        for (std::size_t k = 0; k < samples; ++k)
            chosen.push_back(linf[k * (linf.size() - 1) / (samples - 1)]);

    equidist::DecayOptions dopt;
    dopt.threads = threads;
    const auto res = equidist::decay_experiment(chosen, equidist::Observable::bundled(geom),
                                                geom, table, p, dopt);
    write_file(out_path(cfg, "decay.csv"), equidist::to_csv(res));
    write_file(out_path(cfg, "decay_plot.csv"), equidist::to_plot_data(res));
    std::printf("equidist: %zu rows, fitted exponent %.4f over %lld points\n", res.rows.size(),
                res.fitted_exponent, static_cast<long long>(res.fit_count));
    for (const auto& row : res.rows) {
        if (row.in_linf && !row.empty_window && row.dev_trunc != 0.0) {
            std::printf("ASSERTION FAILED: nonzero truncated deviation %.3g at lambda %.17g\n",
                        row.dev_trunc, row.lambda);
            return 1;
        }
    }
    return 0;
}

int run_verify(const Config& cfg) {
    const auto geom = cfg.geometry();
    const auto c = greens::deficiency_constants(geom, 1e6);
    const Eigen::Matrix2d T = greens::mixing_matrix(c);
    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& name, bool pass, json witness) {
        checks.push_back({{"name", name}, {"pass", pass}, {"witness", witness}});
        all = all && pass;
    };

    add("deficiency-identity",
        c.identity_rel_err_c1 <= 1e-6 && c.identity_rel_err_c2 <= 1e-6,
        {{"c1", c.c1}, {"c2", c.c2}, {"tail_bound", c.tail_bound},
         {"rel_err_c1", c.identity_rel_err_c1}, {"rel_err_c2", c.identity_rel_err_c2}});

    const double whitening =
        (T * greens::gram_matrix(c) * T.transpose() - Eigen::Matrix2d::Identity())
            .cwiseAbs()
            .maxCoeff();
    add("whitening", whitening < 1e-10, {{"defect", whitening}});

    // evaluation-rank sweep: vanishing-subspace dimension per shell
    const auto table = lattice::sieve_norms(2000.0, geom.aspect_sq);
    int rank_fail = 0;
    for (const auto& e : table.entries) {
        if (e.key == 0) continue;
        if (verify::shell_evaluation_rank(e.key, geom).rank != 2) ++rank_fail;
    }
    add("shell-rank-sweep", rank_fail == 0,
        {{"shells", table.size() - 1}, {"rank_failures", rank_fail}});

    // old-eigenvalue multiplicities for the three presets
    bool mult_ok = true;
    json mults = json::array();
    const int drop[3] = {0, 1, 2};
    const char* presets[3] = {"minus-identity", "rank1-sample", "rank2-sample"};
    for (int pi = 0; pi < 3; ++pi) {
        const auto ext = scattering::preset_extension(presets[pi]);
        for (std::int64_t n : {1, 2, 5}) {
            const int d = static_cast<int>(
                lattice::shell_points(geom.aspect_sq, n * lattice::key_den(geom.aspect_sq))
                    .size());
            const auto m = verify::old_multiplicity(n * lattice::key_den(geom.aspect_sq), geom,
                                                    ext, c, T);
            mults.push_back({{"preset", presets[pi]},
                             {"n", n},
                             {"got", m.multiplicity},
                             {"want", d - drop[pi]}});
            mult_ok = mult_ok && m.multiplicity == d - drop[pi];
        }
    }
    add("old-multiplicity", mult_ok, mults);

    const auto rank1 = scattering::rank1_sample();
    const auto nd = verify::im_gi_nondegeneracy(*rank1.v0, geom, T);
    add("im-gi-nondegeneracy", nd.pass,
        {{"shells_with_mass", nd.shells_with_mass}, {"shells_checked", nd.shells_checked}});

    // spectrum interlacing on a short scan
    const auto sums = greens::SecularSums::build(geom, 1e6, 1e4);
    const auto rep = scattering::spectrum_scan(
        200.0, sums, c, T, scattering::fixed_extension(scattering::rank2_sample()),
        cfg.scan_options());
    std::vector<double> news, olds;
    for (const auto& rec : rep.records) (rec.is_new ? news : olds).push_back(rec.lambda);
    std::vector<double> positive;
    for (double v : olds)
        if (v > 0) positive.push_back(v);
    const auto il = verify::weak_interlacing(news, positive);
    add("weak-interlacing", il.pass(2),
        {{"max_run_new", il.max_run_A_between_B}, {"max_run_old", il.max_run_B_between_A},
         {"deficit", rep.max_abs_deficit}});

    write_file(out_path(cfg, "verify.json"), checks.dump(2) + "\n");
    std::printf("%s\n", checks.dump(2).c_str());
    return all ? 0 : 1;
}

int run_report(const Config& cfg) {
    std::vector<int> ids;
    const std::string which = cfg.get("report.criteria");
    if (which == "all") ids = accept::all_criteria();
    else {
        std::istringstream ss(which);
        std::string tok;
        while (std::getline(ss, tok, ',')) ids.push_back(std::stoi(tok));
    }
    const auto results = accept::run(ids, cfg);
    std::string text;
    {
        const auto now = std::chrono::system_clock::now();
        const auto tt = std::chrono::system_clock::to_time_t(now);
        char head[160];
        std::strftime(head, sizeof head, "acceptance report - %Y-%m-%d %H:%M:%S UTC\n",
                      std::gmtime(&tt));
        text = head;
        char hash[64];
        std::snprintf(hash, sizeof hash, "config %016llx\n\n",
                      static_cast<unsigned long long>(cfg.hash()));
        text += hash;
    }
    json jr = json::array();
    bool all = true;
    for (const auto& r : results) {
        const std::string line = accept::format_line(r);
        std::printf("%s\n", line.c_str());
        text += line + "\n";
        jr.push_back({{"id", r.id},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"seconds", r.seconds},
                      {"detail", r.detail}});
        all = all && r.pass;
    }
    write_file(out_path(cfg, "report.txt"), text);
    write_file(out_path(cfg, "report.json"), jr.dump(2) + "\n");
    return all ? 0 : 1;
}

}  // namespace

int run_subcommand(const std::string& cmd, const Config& cfg) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        if (cmd == "norms") return run_norms(cfg);
        if (cmd == "spectrum") return run_spectrum(cfg);
        if (cmd == "sieve") return run_sieve(cfg);
        if (cmd == "equidist") return run_equidist(cfg);
        if (cmd == "verify") return run_verify(cfg);
        if (cmd == "report") return run_report(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", cmd.c_str(), e.what());
        return 1;
    }
    std::fprintf(stderr, "unknown subcommand: %s\n", cmd.c_str());
    return 2;
}

}  // namespace scatterlab::cli

#include "scatterlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "scatterlab/equidist.hpp"
#include "scatterlab/verify.hpp"

namespace scatterlab::accept {

namespace {

using lattice::LatticePoint;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

unsigned cfg_threads(const cli::Config& cfg) {
    const auto t = cfg.get_int("threads");
    return t > 0 ? static_cast<unsigned>(t) : default_threads();
}

// Deterministic sample selection: evenly strided indices.
std::vector<double> strided(const std::vector<double>& v, std::size_t count) {
    if (v.size() <= count) return v;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(v[k * (v.size() - 1) / (count - 1)]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> lambda_inf_members(const TorusGeometry& geom,
                                       const lattice::NormTable& table,
                                       const sieve::FilterParams& p, double lo, double hi,
                                       unsigned threads) {
    const auto mids = sieve::gap_midpoints(table, lo, hi);
    std::vector<char> keep(mids.size(), 0);
    parallel_for(mids.size(), threads, [&](std::size_t i) {
        keep[i] = sieve::in_lambda_infinity(mids[i], geom, table, p) ? 1 : 0;
    });
    std::vector<double> out;
    for (std::size_t i = 0; i < mids.size(); ++i)
        if (keep[i]) out.push_back(mids[i]);
    return out;
}

std::vector<double> lambda_prime_members(const TorusGeometry& geom,
                                         const lattice::NormTable& table,
                                         const sieve::FilterParams& p, double lo, double hi) {
    std::vector<double> out;
    for (double m : sieve::gap_midpoints(table, lo, hi))
        if (sieve::filter_lambda_prime(m, geom, table, p)) out.push_back(m);
    return out;
}

// All nonzero zeta with |zeta| <= lambda^eps and |zeta|^2 <= lambda^delta.
std::vector<LatticePoint> zeta_set(double lambda, const TorusGeometry& geom,
                                   const sieve::FilterParams& p) {
    const double r2 = std::min(std::pow(lambda, 2.0 * p.epsilon), std::pow(lambda, p.delta));
    std::vector<LatticePoint> out;
    if (!(r2 > 0.0)) return out;
    for (const auto& ap : lattice::annulus_points(r2 / 2.0, r2 / 2.0, geom.aspect_sq))
        if (!(ap.xi.xi1 == 0 && ap.xi.xi2 == 0)) out.push_back(ap.xi);
    return out;
}

const Eigen::Vector2cd kSymmetricD{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};

// ------------------------------------------------------------------
// criterion 1: deficiency identities at R = 1e6
// ------------------------------------------------------------------
CriterionResult c1_deficiency(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{1, "deficiency-identity", false, "", 0.0};
    const auto c = greens::deficiency_constants(cfg.geometry(), 1e6);
    const bool ok = c.identity_rel_err_c1 <= 1e-6 && c.identity_rel_err_c2 <= 1e-6;
    r.seconds = t.secs();
    r.pass = ok && r.seconds < 10.0;
    r.detail = fmt("c1=%.12g c2=%.12g rel_err=(%.3g, %.3g) tol=1e-6", c.c1, c.c2,
                   c.identity_rel_err_c1, c.identity_rel_err_c2);
    return r;
}

// ------------------------------------------------------------------
// criterion 2: whitening
// ------------------------------------------------------------------
CriterionResult c2_whitening(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{2, "whitening", false, "", 0.0};
    const auto c = greens::deficiency_constants(cfg.geometry(), 1e6);
    const Eigen::Matrix2d tm = greens::mixing_matrix(c);
    const double defect =
        (tm * greens::gram_matrix(c) * tm.transpose() - Eigen::Matrix2d::Identity())
            .cwiseAbs()
            .maxCoeff();
    r.pass = defect < 1e-10;
    r.detail = fmt("|T Gram T^T - I|_max = %.3g (tol 1e-10)", defect);
    r.seconds = t.secs();
    return r;
}

// ------------------------------------------------------------------
// criterion 3: half-period oracle
// ------------------------------------------------------------------

// Scalar secular machinery for x0 = (pi, pi): on the square torus the
// evaluation phases e^{i<xi,x0>} = (-1)^{xi1+xi2} = (-1)^n are constant on
// shells, the secular problem block-diagonalizes over the norm-parity
// classes, and each class obeys the one-scatterer equation
//   rho_class(lambda) = s_class * tan(phi_class / 2),
// rho_class = sum over class shells of r2(n) [1/(n-lambda) - n/(n^2+1)].
struct ParityOracle {
    std::vector<double> norm[2];  // [parity]
    std::vector<double> r2[2];
    double s_const[2] = {0.0, 0.0};
    double cutoff = 0.0;

    explicit ParityOracle(double R) : cutoff(R) {
        const auto table = lattice::sieve_norms(R, Rational{1, 1});
        for (const auto& e : table.entries) {
            const int par = static_cast<int>(e.key % 2);
            norm[par].push_back(e.norm);
            r2[par].push_back(e.mult);
        }
        for (int par = 0; par < 2; ++par) {
            double acc = 0.0;
            for (std::size_t i = 0; i < norm[par].size(); ++i)
                acc += r2[par][i] / (norm[par][i] * norm[par][i] + 1.0);
            // each parity class has mean point density pi/2 per unit norm
            s_const[par] = acc + (kPi / 2.0) * (kPi / 2.0 - std::atan(R));
        }
    }

    double rho(int par, double lambda) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < norm[par].size(); ++i) {
            const double n = norm[par][i];
            acc += r2[par][i] * (1.0 + n * lambda) / ((n - lambda) * (n * n + 1.0));
        }
        // int_R^inf [1/(n-lambda) - n/(n^2+1)] dn, density pi/2
        acc += (kPi / 2.0) *
               (-std::log((cutoff - lambda) / std::sqrt(cutoff * cutoff + 1.0)));
        return acc;
    }

    // unique root of rho = target strictly inside (lo, hi); rho increases
    // from -inf to +inf between consecutive class poles
    std::optional<double> bisect(int par, double lo, double hi, double target) const {
        const double pad = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        double a = lo + pad, b = hi - pad;
        if (!(b > a)) return std::nullopt;
        double fa = rho(par, a) - target, fb = rho(par, b) - target;
        if (fa >= 0.0 || fb <= 0.0) return std::nullopt;  // root sits inside the pad
        while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
            const double m = 0.5 * (a + b);
            ((rho(par, m) - target) < 0.0 ? a : b) = m;
        }
        return 0.5 * (a + b);
    }
};

CriterionResult c3_half_period(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{3, "half-period-oracle", false, "", 0.0};
    const auto geom = make_geometry(Rational{1, 1}, Eigen::Vector2d::Zero(),
                                    Eigen::Vector2d(kPi, kPi));
    const auto c = greens::deficiency_constants(geom, 1e6);
    const Eigen::Matrix2d T = greens::mixing_matrix(c);
    const double phi_even = 2.0 * kPi / 3.0, phi_odd = kPi / 2.0;
    const auto ext = scattering::swap_symmetric_extension(c, phi_even, phi_odd);
    const auto sums = greens::SecularSums::build(geom, cfg.solver_cutoff(), 1e4);

    // oracle roots per parity class
    const ParityOracle oracle(1e6);
    const double target[2] = {oracle.s_const[0] * std::tan(phi_even / 2.0),
                              oracle.s_const[1] * std::tan(phi_odd / 2.0)};
    struct OracleRoot {
        double lambda;
        int par;
    };
    std::vector<OracleRoot> oroots;
    const double bottom = cfg.get_double("solver.bottom_floor");
    for (int par = 0; par < 2; ++par) {
        const auto& poles = oracle.norm[par];
        if (auto root = oracle.bisect(par, bottom, poles.front(), target[par]))
            oroots.push_back({*root, par});
        for (std::size_t i = 0; i + 1 < poles.size() && poles[i] < 200.0; ++i)
            if (auto root = oracle.bisect(par, poles[i], poles[i + 1], target[par]))
                if (*root < 200.0) oroots.push_back({*root, par});
    }
    std::sort(oroots.begin(), oroots.end(),
              [](const OracleRoot& a, const OracleRoot& b) { return a.lambda < b.lambda; });

    // solver roots over the same range
    std::vector<std::pair<double, Eigen::Vector2cd>> sroots;
    std::vector<std::pair<double, double>> gaps;
    gaps.emplace_back(bottom, sums.norm.front());
    for (std::size_t i = 0; i + 1 < sums.norm.size() && sums.norm[i] < 200.0; ++i)
        gaps.emplace_back(sums.norm[i], sums.norm[i + 1]);
    scattering::SolverOptions sopt;
    sopt.tol = cfg.get_double("solver.tol");
    std::vector<std::vector<scattering::NewEigenpair>> found(gaps.size());
    std::atomic<bool> solver_failed{false};
    parallel_for(gaps.size(), cfg_threads(cfg), [&](std::size_t i) {
        try {
            found[i] = scattering::find_new_eigenvalues(gaps[i].first, gaps[i].second, sums, T,
                                                        scattering::fixed_extension(ext), sopt);
        } catch (const std::exception&) {
            solver_failed = true;
        }
    });
    if (solver_failed) {
        r.detail = "solver error in a gap";
        r.seconds = t.secs();
        return r;
    }
    for (const auto& gap_roots : found)
        for (const auto& p : gap_roots)
            if (p.lambda < 200.0) sroots.emplace_back(p.lambda, p.d);
    std::sort(sroots.begin(), sroots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    if (sroots.size() != oroots.size()) {
        r.detail = fmt("root count mismatch: solver %zu vs oracle %zu", sroots.size(),
                       oroots.size());
        r.seconds = t.secs();
        return r;
    }
    double worst_gap = 0.0, worst_parity = 1.0;
    for (std::size_t i = 0; i < sroots.size(); ++i) {
        worst_gap = std::max(worst_gap, std::abs(sroots[i].first - oroots[i].lambda));
        const Eigen::Vector2cd dir = oroots[i].par == 0
                                         ? Eigen::Vector2cd(1.0, 1.0).normalized()
                                         : Eigen::Vector2cd(1.0, -1.0).normalized();
        worst_parity = std::min(worst_parity, std::abs(dir.dot(sroots[i].second)));
    }
    r.seconds = t.secs();
    r.pass = worst_gap <= 1e-6 && worst_parity >= 1.0 - 1e-6 && r.seconds < 120.0;
    r.detail = fmt("%zu roots below 200; max |solver-oracle| = %.3g (tol 1e-6), "
                   "min parity overlap = %.12g, %.1fs",
                   sroots.size(), worst_gap, worst_parity, r.seconds);
    return r;
}

// ------------------------------------------------------------------
// criterion 4: interlacing and counting
// ------------------------------------------------------------------
CriterionResult c4_interlacing(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{4, "interlacing-counting", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto c = greens::deficiency_constants(geom, 1e6);
    const Eigen::Matrix2d T = greens::mixing_matrix(c);
    const auto sums = greens::SecularSums::build(geom, cfg.solver_cutoff(), 1e4);
    auto scan_opt = cfg.scan_options();

    bool all_ok = true;
    std::string detail;
    for (const auto* preset : {"rank1-sample", "rank2-sample"}) {
        const auto ext = scattering::preset_extension(preset);
        const auto rep = scattering::spectrum_scan(500.0, sums, c, T,
                                                   scattering::fixed_extension(ext), scan_opt);
        std::vector<double> news;
        std::vector<double> olds;
        for (const auto& rec : rep.records)
            (rec.is_new ? news : olds).push_back(rec.lambda);
        std::vector<double> positive_olds;
        for (double v : olds)
            if (v > 0.0) positive_olds.push_back(v);
        const auto il = verify::weak_interlacing(news, positive_olds);
        const bool ok = il.pass(2) && rep.max_new_in_gap <= 2 &&
                        rep.max_abs_deficit <= ext.rank_defect;
        all_ok = all_ok && ok;
        detail += fmt("[%s: new=%zu max/gap=%d deficit=%d (<=%d) interlace=%s] ", preset,
                      news.size(), rep.max_new_in_gap, rep.max_abs_deficit, ext.rank_defect,
                      il.pass(2) ? "ok" : "FAIL");
    }
    r.pass = all_ok;
    r.detail = detail;
    r.seconds = t.secs();
    return r;
}

// ------------------------------------------------------------------
// criteria 5 / 11 cores (shared with the rectangular re-run)
// ------------------------------------------------------------------
struct ExactZeroOutcome {
    bool pass = false;
    std::size_t members = 0;
    std::size_t samples = 0;
    std::size_t zeta_checks = 0;
    std::string note;
};

ExactZeroOutcome exact_zero_core(const TorusGeometry& geom, const sieve::FilterParams& p,
                                 unsigned threads) {
    ExactZeroOutcome out;
    const auto table = lattice::sieve_norms(1.1e5, geom.aspect_sq);
    const auto linf = lambda_inf_members(geom, table, p, 1e3, 1e5, threads);
    out.members = linf.size();
    if (linf.size() < 100) {
        out.note = fmt("only %zu Lambda_inf members in [1e3,1e5]", linf.size());
        return out;
    }
    const auto samples = strided(linf, 100);
    out.samples = samples.size();
    std::atomic<std::size_t> checks{0};
    std::atomic<bool> ok{true};
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        try {
            const double lam = samples[i];
            const auto state = equidist::truncated_state(lam, kSymmetricD, geom, p);
            for (const auto& zeta : zeta_set(lam, geom, p)) {
                const auto m = equidist::matrix_element(state, zeta);
                const bool disjoint = sieve::window_disjointness(lam, zeta, geom, p);
                if (m.terms != 0 || m.value != cplx{0.0, 0.0} || !disjoint) ok = false;
                ++checks;
            }
        } catch (const std::exception&) {
            ok = false;
        }
    });
    out.zeta_checks = checks;
    out.pass = ok;
    out.note = fmt("%zu members, %zu samples, %zu zeta checks, all structurally zero: %s",
                   out.members, out.samples, out.zeta_checks, ok ? "yes" : "NO");
    return out;
}

struct DensityOutcome {
    bool trend_ok = false;
    bool final_ok = false;
    double final_density = 0.0;
    std::string blocks;
};

DensityOutcome density_core(const TorusGeometry& geom, const sieve::FilterParams& p,
                            unsigned threads) {
    DensityOutcome out;
    const auto table = lattice::sieve_norms(1.1e5, geom.aspect_sq);
    const auto mids = sieve::gap_midpoints(table, 0.0, 1e5);
    sieve::DensityOptions dopt;
    dopt.block_start = 1e3;
    dopt.threads = threads;
    const auto rows = sieve::density_report(mids, 1e5, geom, table, p, dopt);
    out.trend_ok = true;
    for (std::size_t b = 1; b < rows.size(); ++b) {
        const auto& row = rows[b];
        if (row.count_base == 0) continue;
        out.blocks += fmt("[%.3g,%.3g):%lld/%lld ", row.block_lo, row.block_hi,
                          static_cast<long long>(row.count_linf),
                          static_cast<long long>(row.count_base));
        if (b >= 2 && rows[b - 1].count_base > 0) {
            // exact rational comparison of consecutive block densities
            if (row.count_linf * rows[b - 1].count_base <
                rows[b - 1].count_linf * row.count_base)
                out.trend_ok = false;
        }
        out.final_density =
            static_cast<double>(row.count_linf) / static_cast<double>(row.count_base);
    }
    out.final_ok = out.final_density > 0.8;
    return out;
}

CriterionResult c5_exact_zero(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{5, "exact-zero-mechanism", false, "", 0.0};
    const auto out = exact_zero_core(cfg.geometry(), cfg.filter_params(), cfg_threads(cfg));
    r.pass = out.pass;
    r.detail = out.note;
    r.seconds = t.secs();
    return r;
}

// ------------------------------------------------------------------
// criterion 6: decay envelope
// ------------------------------------------------------------------
CriterionResult c6_decay(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{6, "decay-envelope", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const auto table = lattice::sieve_norms(1.1e5, geom.aspect_sq);
    const auto linf = lambda_inf_members(geom, table, p, 1e3, 1e5, cfg_threads(cfg));
    if (linf.size() < 100) {
        r.detail = fmt("only %zu Lambda_inf members", linf.size());
        r.seconds = t.secs();
        return r;
    }
    const auto samples = strided(linf, 100);
    equidist::DecayOptions dopt;
    dopt.threads = cfg_threads(cfg);
    const auto res = equidist::decay_experiment(samples, equidist::Observable::bundled(geom),
                                                geom, table, p, dopt);
    double max_low = 0.0, max_high = 0.0;
    std::size_t n_low = 0, n_high = 0;
    for (const auto& row : res.rows) {
        if (row.lambda < 1e4) {
            max_low = std::max(max_low, row.dev_full);
            ++n_low;
        } else {
            max_high = std::max(max_high, row.dev_full);
            ++n_high;
        }
    }
    const double factor = 2.0 * std::pow(10.0, -0.125 + 3.0 * p.epsilon);
    r.seconds = t.secs();
    r.pass = n_low > 0 && n_high > 0 && max_high <= factor * max_low && r.seconds < 600.0;
    r.detail = fmt("max dev [1e3,1e4)=%.6g (%zu pts), [1e4,1e5]=%.6g (%zu pts), bound %.6g, "
                   "fit exponent %.3f, %.1fs",
                   max_low, n_low, max_high, n_high, factor * max_low, res.fitted_exponent,
                   r.seconds);
    return r;
}

// ------------------------------------------------------------------
// criteria 7 / 8: norm lower bound and truncation bound on Lambda'
// ------------------------------------------------------------------
CriterionResult c7_norm_lower_bound(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{7, "norm-lower-bound", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const auto table = lattice::sieve_norms(1.1e4, geom.aspect_sq);
    // calibration over every first-decade member, checks on strided samples
    const auto calib = lambda_prime_members(geom, table, p, 1e2, 1e3);
    const auto samples = strided(lambda_prime_members(geom, table, p, 1e3, 1e4), 200);
    const double R_margin = 1e5;
    const auto shells = greens::ShellTable::build(geom, 1e4 + R_margin);
    auto min_norm_sq = [&](double lam) {
        // exact minimum of 16 pi^4 ||G_lambda||^2 over unit coefficient pairs
        const Eigen::Matrix2d h = greens::norm_sq_matrix(lam, shells, lam + R_margin);
        return kSixteenPiFourth * (h(0, 0) - std::abs(h(0, 1)));
    };
    double c_cal = std::numeric_limits<double>::infinity();
    for (double lam : calib)
        c_cal = std::min(c_cal, min_norm_sq(lam) * std::pow(lam, 4.0 * p.epsilon));
    std::size_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (double lam : samples) {
        const double ratio =
            min_norm_sq(lam) / (c_cal * std::pow(lam, -4.0 * p.epsilon));
        worst_margin = std::min(worst_margin, ratio);
        if (ratio < 1.0) ++violations;
    }
    r.pass = !calib.empty() && !samples.empty() && violations == 0;
    r.detail = fmt("c = %.6g from %zu calibration pts; %zu checked, %zu violations, "
                   "min value/bound = %.3f",
                   c_cal, calib.size(), samples.size(), violations, worst_margin);
    r.seconds = t.secs();
    return r;
}

CriterionResult c8_truncation_bound(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{8, "truncation-bound", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const auto table = lattice::sieve_norms(1.1e4, geom.aspect_sq);
    const auto calib = lambda_prime_members(geom, table, p, 1e2, 1e3);
    const auto samples = strided(lambda_prime_members(geom, table, p, 1e3, 1e4), 200);
    const double R_margin = 1e5;
    auto worst_gap = [&](double lam) {
        const auto [w, f] = equidist::parseval_grams(lam, geom, p, lam + R_margin);
        const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> ges(w, f);
        const double mu = std::max(0.0, std::min(1.0, ges.eigenvalues().minCoeff()));
        return 2.0 - 2.0 * std::sqrt(mu);  // max over unit coefficient pairs
    };
    double C_cal = 0.0;
    for (double lam : calib)
        C_cal = std::max(C_cal, worst_gap(lam) * std::pow(lam, p.delta - 5.0 * p.epsilon));
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (double lam : samples) {
        const double ratio =
            worst_gap(lam) / (C_cal * std::pow(lam, 5.0 * p.epsilon - p.delta));
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > 1.0) ++violations;
    }
    r.pass = !calib.empty() && !samples.empty() && violations == 0;
    r.detail = fmt("C = %.6g from %zu calibration pts; %zu checked, %zu violations, "
                   "max gap/bound = %.3f",
                   C_cal, calib.size(), samples.size(), violations, worst_ratio);
    r.seconds = t.secs();
    return r;
}

// ------------------------------------------------------------------
// criterion 9: appendix sweep
// ------------------------------------------------------------------
CriterionResult c9_appendix(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{9, "appendix-sweep", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto c = greens::deficiency_constants(geom, 1e6);
    const Eigen::Matrix2d T = greens::mixing_matrix(c);

    const auto table = lattice::sieve_norms(2000.0, geom.aspect_sq);
    std::size_t rank_fail = 0, ill = 0, checked = 0;
    for (const auto& e : table.entries) {
        if (e.key == 0) continue;
        const auto sr = verify::shell_evaluation_rank(e.key, geom);
        if (sr.rank != 2) ++rank_fail;
        if (sr.ill_conditioned) ++ill;
        ++checked;
    }

    bool mult_ok = true;
    std::string mult_detail;
    const int expected_drop[3] = {0, 1, 2};
    const char* presets[3] = {"minus-identity", "rank1-sample", "rank2-sample"};
    for (int pi = 0; pi < 3; ++pi) {
        const auto ext = scattering::preset_extension(presets[pi]);
        for (std::int64_t n : {std::int64_t{1}, std::int64_t{2}, std::int64_t{5}}) {
            const int d = static_cast<int>(lattice::circle_points(n).size());
            const auto m = verify::old_multiplicity(n, geom, ext, c, T);
            if (m.multiplicity != d - expected_drop[pi]) {
                mult_ok = false;
                mult_detail += fmt("[%s n=%lld got %d want %d] ", presets[pi],
                                   static_cast<long long>(n), m.multiplicity,
                                   d - expected_drop[pi]);
            }
        }
    }

    const auto rank1 = scattering::rank1_sample();
    const auto nd = verify::im_gi_nondegeneracy(*rank1.v0, geom, T);

    r.pass = rank_fail == 0 && mult_ok && nd.pass;
    r.detail = fmt("rank sweep: %zu shells, %zu != 2, %zu ill-conditioned; multiplicities %s; "
                   "nondegeneracy shells %d/%d %s",
                   checked, rank_fail, ill, mult_ok ? "ok" : mult_detail.c_str(),
                   nd.shells_with_mass, nd.shells_checked, nd.pass ? "ok" : "FAIL");
    r.seconds = t.secs();
    return r;
}

// ------------------------------------------------------------------
// criterion 10: quadrature oracle
// ------------------------------------------------------------------

// Real-space route: trapezoid (periodic rectangle) quadrature of
// e^{i<zeta,x>} |G_L(x)|^2 on an N x N grid, exact for trigonometric
// polynomials below the aliasing frequency.
cplx quadrature_matrix_element(const equidist::TruncatedState& st, const LatticePoint& zeta,
                               int N) {
    const auto& geom = st.geom;
    const Eigen::Vector2d periods = torus_periods(geom.aspect_sq);
    std::vector<cplx> g(static_cast<std::size_t>(N) * static_cast<std::size_t>(N),
                        cplx{0.0, 0.0});
    for (const auto& e : st.entries) {
        const Eigen::Vector2d xi = geom.dual_vector(e.xi.xi1, e.xi.xi2);
        const cplx coef = -e.c / (kFourPiSq * e.denom);
        const cplx rot_row = std::polar(1.0, xi[0] * periods[0] / N);
        const cplx rot_col = std::polar(1.0, xi[1] * periods[1] / N);
        cplx row{1.0, 0.0};
        for (int i = 0; i < N; ++i) {
            cplx z = coef * row;
            for (int j = 0; j < N; ++j) {
                g[static_cast<std::size_t>(i) * N + j] += z;
                z *= rot_col;
            }
            row *= rot_row;
        }
    }
    const Eigen::Vector2d zv = geom.dual_vector(zeta.xi1, zeta.xi2);
    const cplx rot_row = std::polar(1.0, zv[0] * periods[0] / N);
    const cplx rot_col = std::polar(1.0, zv[1] * periods[1] / N);
    cplx acc{0.0, 0.0};
    cplx row{1.0, 0.0};
    for (int i = 0; i < N; ++i) {
        cplx z = row;
        for (int j = 0; j < N; ++j) {
            acc += z * std::norm(g[static_cast<std::size_t>(i) * N + j]);
            z *= rot_col;
        }
        row *= rot_row;
    }
    const double cell = (periods[0] / N) * (periods[1] / N);
    return acc * cell;
}

CriterionResult c10_quadrature(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{10, "quadrature-oracle", false, "", 0.0};
    const auto geom = cfg.geometry();
    const auto p = cfg.filter_params();
    const double lambda = 100.5;
    const auto st = equidist::truncated_state(lambda, kSymmetricD, geom, p);
    const std::vector<LatticePoint> zetas{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}};
    double worst = 0.0;
    std::size_t nonzero = 0;
    for (const auto& z : zetas) {
        const auto exact = equidist::matrix_element(st, z);
        const cplx quad = quadrature_matrix_element(st, z, 512);
        const double err = std::abs(quad - exact.value) /
                           std::max(std::abs(exact.value), st.norm_sq_trunc);
        worst = std::max(worst, err);
        if (exact.terms > 0 && !(z.xi1 == 0 && z.xi2 == 0)) ++nonzero;
    }
    r.pass = worst <= 1e-8 && nonzero >= 2;
    r.detail = fmt("lambda=%.1f, window %zu points, %zu nonzero shifted elements, "
                   "max rel err %.3g (tol 1e-8)",
                   lambda, st.entries.size(), nonzero, worst);
    r.seconds = t.secs();
    return r;
}

CriterionResult c11_density(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{11, "density-trend", false, "", 0.0};
    const auto out = density_core(cfg.geometry(), cfg.filter_params(), cfg_threads(cfg));
    r.pass = out.trend_ok && out.final_ok;
    r.detail = fmt("blocks %s| trend %s, final density %.4f (must exceed 0.8: %s) -- the 0.8 "
                   "threshold is a calibrated expectation, not an asymptotic guarantee",
                   out.blocks.c_str(), out.trend_ok ? "non-decreasing" : "NOT monotone",
                   out.final_density, out.final_ok ? "yes" : "NO");
    r.seconds = t.secs();
    return r;
}

CriterionResult c12_rectangular(const cli::Config& cfg) {
    Timer t;
    CriterionResult r{12, "rectangular-mode", false, "", 0.0};
    const auto geom = rectangular_geometry(Rational::make(2, 1));
    const auto p = cfg.filter_params();
    const auto zero = exact_zero_core(geom, p, cfg_threads(cfg));
    const auto dens = density_core(geom, p, cfg_threads(cfg));
    r.seconds = t.secs();
    r.pass = zero.pass && dens.trend_ok && dens.final_ok && r.seconds < 600.0;
    r.detail = fmt("exact-zero: %s | density blocks %s| trend %s, final %.4f (>0.8: %s), %.1fs",
                   zero.note.c_str(), dens.blocks.c_str(),
                   dens.trend_ok ? "non-decreasing" : "NOT monotone", dens.final_density,
                   dens.final_ok ? "yes" : "NO", r.seconds);
    return r;
}

}  // namespace

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

CriterionResult run_criterion(int id, const cli::Config& cfg) {
    switch (id) {
        case 1: return c1_deficiency(cfg);
        case 2: return c2_whitening(cfg);
        case 3: return c3_half_period(cfg);
        case 4: return c4_interlacing(cfg);
        case 5: return c5_exact_zero(cfg);
        case 6: return c6_decay(cfg);
        case 7: return c7_norm_lower_bound(cfg);
        case 8: return c8_truncation_bound(cfg);
        case 9: return c9_appendix(cfg);
        case 10: return c10_quadrature(cfg);
        case 11: return c11_density(cfg);
        case 12: return c12_rectangular(cfg);
        default: throw std::invalid_argument("unknown criterion id");
    }
}

std::vector<CriterionResult> run(const std::vector<int>& ids, const cli::Config& cfg) {
    std::vector<CriterionResult> out;
    for (int id : ids) {
        try {
            out.push_back(run_criterion(id, cfg));
        } catch (const std::exception& e) {
            out.push_back({id, "criterion-" + std::to_string(id), false,
                           std::string("exception: ") + e.what(), 0.0});
        }
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    return fmt("[%s] %2d %-22s (%6.1fs) %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
               r.seconds, r.detail.c_str());
}

}  // namespace scatterlab::accept

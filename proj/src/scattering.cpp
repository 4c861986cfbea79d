#include "scatterlab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scatterlab/verify.hpp"

namespace scatterlab::scattering {

namespace {

const cplx kI{0.0, 1.0};

Eigen::Matrix2cd resolvent_block(double lambda, const greens::SecularSums& sums) {
    // B_i(lambda): entries (G_i - G_lambda)(x_j - x_k)
    const cplx r0 = sums.eval(lambda, kI, greens::Displacement::Zero).value;
    const cplx rx = sums.eval(lambda, kI, greens::Displacement::X0).value;
    Eigen::Matrix2cd b;
    b << r0, rx, rx, r0;
    return b;
}

std::pair<double, double> singular_values(const Eigen::Matrix2cd& m) {
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    return {svd.singularValues()(1), svd.singularValues()(0)};  // (min, max)
}

struct GoldenResult {
    double x = 0.0;
    double f = 0.0;
};

GoldenResult golden_min(const std::function<double(double)>& f, double a, double b, double xtol) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

}  // namespace

ExtensionU extension_from_matrix(const Eigen::Matrix2cd& U) {
    const Eigen::Matrix2cd defect = U * U.adjoint() - Eigen::Matrix2cd::Identity();
    if (defect.cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("extension_from_matrix: matrix is not unitary");
    ExtensionU e;
    e.U = U;
    const Eigen::Matrix2cd ipu = Eigen::Matrix2cd::Identity() + U;
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(ipu);
    e.rank_defect = 0;
    for (int i = 0; i < 2; ++i)
        if (svd.singularValues()(i) > 1e-8) ++e.rank_defect;
    if (e.rank_defect == 1) {
        const Eigen::Matrix2cd ipu_adj = Eigen::Matrix2cd::Identity() + U.adjoint();
        const Eigen::JacobiSVD<Eigen::Matrix2cd> ks(ipu_adj, Eigen::ComputeFullV);
        Eigen::Vector2cd v0 = ks.matrixV().col(1);
        if ((ipu_adj * v0).norm() > 1e-8)
            throw std::runtime_error("extension_from_matrix: kernel vector validation failed");
        e.v0 = v0;
    }
    return e;
}

ExtensionU make_unitary(double phase, const std::array<double, 3>& su2) {
    const double theta = su2[0], psi1 = su2[1], psi2 = su2[2];
    const cplx a = std::polar(std::cos(theta), psi1);
    const cplx b = std::polar(std::sin(theta), psi2);
    Eigen::Matrix2cd m;
    m << a, b, -std::conj(b), std::conj(a);
    return extension_from_matrix(std::polar(1.0, phase) * m);
}

ExtensionU minus_identity() { return make_unitary(kPi, {0.0, 0.0, 0.0}); }

ExtensionU rank1_sample() { return make_unitary(0.75 * kPi, {0.0, 0.25 * kPi, 0.0}); }

ExtensionU rank2_sample() { return make_unitary(0.4, {0.9, 0.7, -0.3}); }

ExtensionU preset_extension(const std::string& name) {
    if (name == "minus-identity") return minus_identity();
    if (name == "rank1-sample") return rank1_sample();
    if (name == "rank2-sample") return rank2_sample();
    throw std::invalid_argument("unknown extension preset: " + name);
}

ExtensionU swap_symmetric_extension(const greens::DeficiencyConstants& c, double phi_plus,
                                    double phi_minus) {
    const Eigen::Matrix2d t = greens::mixing_matrix(c);
    Eigen::Vector2d uplus = t * Eigen::Vector2d(1.0, 1.0);
    uplus.normalize();
    const Eigen::Vector2d uminus(-uplus[1], uplus[0]);  // = +- T(1,-1)/|T(1,-1)|
    const Eigen::Matrix2d pp = uplus * uplus.transpose();
    const Eigen::Matrix2d pm = uminus * uminus.transpose();
    const Eigen::Matrix2cd u =
        std::polar(1.0, phi_plus) * pp.cast<cplx>() + std::polar(1.0, phi_minus) * pm.cast<cplx>();
    return extension_from_matrix(u);
}

SecularMatrix secular_matrix(double lambda, const greens::SecularSums& sums,
                             const Eigen::Matrix2cd& U, const Eigen::Matrix2d& T,
                             double margin_frac) {
    if (margin_frac > 0.0) {
        if (!sums.norm.empty() && lambda < sums.norm.front()) {
            if (sums.norm.front() - lambda < margin_frac)
                throw near_singularity_error(
                    "secular_matrix: too close to the spectrum bottom; refine adaptively");
        } else {
            const auto [lo, hi] = sums.gap_around(lambda);
            const double margin = margin_frac * (hi - lo);
            if (lambda - lo < margin || hi - lambda < margin)
                throw near_singularity_error(
                    "secular_matrix: within endpoint margin; refine adaptively");
        }
    }
    const Eigen::Matrix2cd b_i = resolvent_block(lambda, sums);
    const Eigen::Matrix2cd b_mi = b_i.conjugate();
    // columns of N are the vectors A_lambda(x_j); M v = 0 encodes
    // <v, A_lambda(x_j)> = 0 under <u,w> = sum u_k conj(w_k)
    const Eigen::Matrix2cd n = T * b_i + U * T * b_mi;
    SecularMatrix out;
    out.lambda = lambda;
    out.M = n.adjoint();
    std::tie(out.sigma_min, out.sigma_max) = singular_values(out.M);
    return out;
}

Eigen::Matrix2cd characteristic_matrix(double lambda, const greens::SecularSums& sums,
                                       const Eigen::Matrix2cd& U, const Eigen::Matrix2d& T) {
    const Eigen::Matrix2cd b = T * resolvent_block(lambda, sums);
    return U.adjoint() * b * b.conjugate().inverse();
}

namespace {

struct Candidate {
    double lambda = 0.0;
    double sigma = 0.0;
};

// Eigenphases of K matched continuously across the grid; returns bisected
// crossings of -1. Used only while the unitarity monitor holds.
std::vector<double> phase_tracking_roots(double tlo, double thi, int grid,
                                         const greens::SecularSums& sums,
                                         const Eigen::Matrix2d& T, const UFunc& U,
                                         double unitarity_tol, bool& ok) {
    ok = true;
    auto phases = [&](double x, const std::array<double, 2>& prev,
                      bool have_prev) -> std::array<double, 2> {
        const Eigen::Matrix2cd k = characteristic_matrix(x, sums, U(x), T);
        const double defect =
            (k * k.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
        if (defect > unitarity_tol) {
            ok = false;
            return {0.0, 0.0};
        }
        const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(k, false);
        std::array<double, 2> cur{std::arg(es.eigenvalues()(0)), std::arg(es.eigenvalues()(1))};
        if (have_prev) {
            auto dist = [](double a, double b) {
                double d = std::fmod(std::abs(a - b), kTwoPi);
                return std::min(d, kTwoPi - d);
            };
            if (dist(cur[0], prev[0]) + dist(cur[1], prev[1]) >
                dist(cur[1], prev[0]) + dist(cur[0], prev[1]))
                std::swap(cur[0], cur[1]);
            // lift continuously
            for (int j = 0; j < 2; ++j) {
                double delta = cur[j] - std::fmod(prev[j], kTwoPi);
                while (delta > kPi) delta -= kTwoPi;
                while (delta < -kPi) delta += kTwoPi;
                cur[j] = prev[j] + delta;
            }
        }
        return cur;
    };

    std::vector<double> roots;
    std::array<double, 2> prev{};
    const double h = (thi - tlo) / (grid - 1);
    for (int i = 0; i < grid && ok; ++i) {
        const double x = tlo + i * h;
        const auto cur = phases(x, prev, i > 0);
        if (!ok) break;
        if (i > 0) {
            for (int j = 0; j < 2; ++j) {
                // crossing of pi mod 2pi between prev[j] and cur[j]
                const double a = (prev[j] - kPi) / kTwoPi;
                const double b = (cur[j] - kPi) / kTwoPi;
                if (std::floor(a) != std::floor(b)) {
                    double lo = x - h, hi = x, plo = prev[j];
                    const double target = kTwoPi * std::max(std::floor(a), std::floor(b)) + kPi;
                    std::array<double, 2> p{prev};
                    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi));
                         ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const auto pm = phases(mid, p, true);
                        if (!ok) break;
                        if ((pm[j] - target) * (plo - target) <= 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                            plo = pm[j];
                            p = pm;
                        }
                    }
                    if (ok) roots.push_back(0.5 * (lo + hi));
                }
            }
        }
        prev = cur;
    }
    return roots;
}

}  // namespace

std::vector<NewEigenpair> find_new_eigenvalues(double gap_lo, double gap_hi,
                                               const greens::SecularSums& sums,
                                               const Eigen::Matrix2d& T, const UFunc& U,
                                               const SolverOptions& opt) {
    if (!(gap_hi > gap_lo)) throw std::invalid_argument("find_new_eigenvalues: empty gap");
    const double width = gap_hi - gap_lo;
    const double margin = opt.margin_frac * width;
    const double tlo = gap_lo + margin, thi = gap_hi - margin;
    if (thi <= tlo) return {};

    auto sigma_at = [&](double x) {
        return secular_matrix(x, sums, U(x), T, 0.0);
    };
    auto sigma_val = [&](double x) { return sigma_at(x).sigma_min; };

    std::vector<Candidate> cands;
    auto refine_on = [&](const std::function<double(double)>& f, double a, double b) {
        const double xtol = 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
        const GoldenResult g = golden_min(f, a, b, xtol);
        cands.push_back({g.x, sigma_val(g.x)});
    };

    if (opt.phase_tracking) {
        bool ok = false;
        const auto roots = phase_tracking_roots(tlo, thi, opt.grid, sums, T, U,
                                                opt.phase_tracking_unitarity_tol, ok);
        if (ok) {
            for (double r : roots) {
                const double h = (thi - tlo) / (opt.grid - 1);
                refine_on(sigma_val, std::max(tlo, r - h), std::min(thi, r + h));
            }
        }
        // monitor failed: fall through to the baseline scan below
        if (!ok) cands.clear();
    }

    auto compensated = [&](double x) {
        return sigma_val(x) * (x - gap_lo) * (gap_hi - x);
    };
    if (cands.empty()) {
        // baseline: uniform grid, adaptively refined where the
        // pole-compensated sigma_min (x - lo)(hi - x) is small; the
        // compensation keeps narrow dips visible against the
        // 1/(endpoint distance) blowup
        const int n = std::max(8, opt.grid);
        std::vector<double> xs(static_cast<std::size_t>(n)), gs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            xs[ui] = tlo + (thi - tlo) * i / (n - 1);
            gs[ui] = compensated(xs[ui]);
        }
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> sorted = gs;
            std::sort(sorted.begin(), sorted.end());
            const double med = sorted[sorted.size() / 2];
            std::vector<double> extra;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                if (std::min(gs[i], gs[i + 1]) >= 0.25 * med) continue;
                for (int k = 1; k < 8; ++k)
                    extra.push_back(xs[i] + (xs[i + 1] - xs[i]) * k / 8.0);
            }
            if (extra.empty()) break;
            for (double x : extra) {
                xs.push_back(x);
                gs.push_back(compensated(x));
            }
            std::vector<std::size_t> order(xs.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
            std::vector<double> xs2, gs2;
            for (std::size_t i : order) {
                xs2.push_back(xs[i]);
                gs2.push_back(gs[i]);
            }
            xs.swap(xs2);
            gs.swap(gs2);
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const bool left_ok = i == 0 || gs[i] <= gs[i - 1];
            const bool right_ok = i + 1 == xs.size() || gs[i] <= gs[i + 1];
            if (left_ok && right_ok) {
                const double a = xs[i == 0 ? 0 : i - 1];
                const double b = xs[std::min(xs.size() - 1, i + 1)];
                if (b > a) refine_on(compensated, a, b);
            }
        }
        // geometric endpoint offsets catch roots below the grid resolution
        auto rescan_end = [&](bool from_lo) {
            std::vector<double> xs2, gs2;
            for (double off = margin; off <= 0.1 * width; off *= 2.0) {
                const double x = from_lo ? gap_lo + off : gap_hi - off;
                if (x <= tlo || x >= thi) continue;
                xs2.push_back(x);
                gs2.push_back(compensated(x));
            }
            for (std::size_t i = 0; i + 2 < xs2.size(); ++i) {
                if (gs2[i + 1] <= gs2[i] && gs2[i + 1] <= gs2[i + 2]) {
                    const double a = std::min(xs2[i], xs2[i + 2]);
                    const double b = std::max(xs2[i], xs2[i + 2]);
                    refine_on(compensated, a, b);
                }
            }
        };
        rescan_end(true);
        rescan_end(false);
    }

    // validate, dedup, extract kernel data
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
    std::vector<NewEigenpair> roots;
    for (const auto& c : cands) {
        const SecularMatrix sm = sigma_at(c.lambda);
        if (sm.sigma_min > opt.tol * sm.sigma_max) continue;
        // local minimality
        const double probe = 10.0 * opt.tol * width;
        bool minimal = true;
        for (double s : {-probe, probe}) {
            const double x = c.lambda + s;
            if (x > tlo && x < thi && sigma_val(x) <= sm.sigma_min) minimal = false;
        }
        if (!minimal) continue;
        if (!roots.empty() && c.lambda - roots.back().lambda < 1e-9) {
            if (sm.sigma_min < roots.back().residual) roots.pop_back();
            else continue;
        }
        const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(sm.M, Eigen::ComputeFullV);
        const Eigen::Vector2cd v = svd.matrixV().col(1);
        const Eigen::Vector2cd d_raw =
            T.transpose() * (Eigen::Matrix2cd::Identity() + U(c.lambda).adjoint()) * v;
        if (d_raw.norm() < 1e-12) continue;  // v in ker(I+U^*): not an eigenfunction
        NewEigenpair pair;
        pair.lambda = c.lambda;
        pair.v = v;
        pair.d = d_raw.normalized();
        pair.residual = sm.sigma_min;
        roots.push_back(pair);
    }
    if (roots.size() > 2) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "find_new_eigenvalues: %zu roots in gap (%.17g, %.17g); first brackets "
                      "%.17g %.17g %.17g",
                      roots.size(), gap_lo, gap_hi, roots[0].lambda, roots[1].lambda,
                      roots[2].lambda);
        throw std::runtime_error(buf);
    }
    return roots;
}

SpectrumReport spectrum_scan(double lambda_max, const greens::SecularSums& sums,
                             const greens::DeficiencyConstants& c, const Eigen::Matrix2d& T,
                             const UFunc& U, const ScanOptions& opt) {
    if (sums.norm.empty() || sums.split_norm < lambda_max)
        throw std::invalid_argument("spectrum_scan: table does not cover lambda_max");

    SpectrumReport rep;
    rep.lambda_max = lambda_max;

    // gap list: bottom gap plus all gaps intersecting (0, lambda_max)
    std::vector<std::pair<double, double>> gaps;
    gaps.emplace_back(opt.bottom_floor, sums.norm.front());
    for (std::size_t i = 0; i + 1 < sums.norm.size() && sums.norm[i] < lambda_max; ++i)
        gaps.emplace_back(sums.norm[i], sums.norm[i + 1]);

    std::vector<std::vector<NewEigenpair>> per_gap(gaps.size());
    std::vector<std::string> errors(gaps.size());
    parallel_for(gaps.size(), opt.threads, [&](std::size_t i) {
        try {
            per_gap[i] = find_new_eigenvalues(gaps[i].first, gaps[i].second, sums, T, U,
                                              opt.solver);
        } catch (const std::exception& e) {
            char buf[192];
            std::snprintf(buf, sizeof buf, "gap (%.17g, %.17g): %s", gaps[i].first,
                          gaps[i].second, e.what());
            errors[i] = buf;
        }
    });
    for (const auto& msg : errors)
        if (!msg.empty()) throw std::runtime_error("spectrum_scan: " + msg);

    // old-eigenvalue multiplicities
    const std::int64_t den = lattice::key_den(sums.geom.aspect_sq);
    struct Event {
        double lambda;
        int d_laplace;   // Laplace multiplicity added at this point
        int d_extension; // extension multiplicity added
        const NewEigenpair* pair;  // non-null for new eigenvalues
        std::int64_t key;
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < sums.norm.size() && sums.norm[i] <= lambda_max; ++i) {
        const double n = sums.norm[i];
        const auto key = static_cast<std::int64_t>(std::llround(n * static_cast<double>(den)));
        const ExtensionU ext = extension_from_matrix(U(n));
        const auto mult = verify::old_multiplicity(key, sums.geom, ext, c, T);
        if (mult.floored) rep.multiplicity_floored = true;
        events.push_back({n, static_cast<int>(std::lround(sums.r2[i])), mult.multiplicity,
                          nullptr, key});
    }
    for (std::size_t i = 0; i < per_gap.size(); ++i) {
        rep.max_new_in_gap = std::max(rep.max_new_in_gap, static_cast<int>(per_gap[i].size()));
        for (const auto& p : per_gap[i]) {
            if (p.lambda > lambda_max) continue;
            if (p.lambda < 0) ++rep.bottom_gap_roots;
            events.push_back({p.lambda, 0, 1, &p, 0});
        }
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.lambda < b.lambda; });

    int n_laplace = 0, n_ext = 0;
    for (const auto& ev : events) {
        n_laplace += ev.d_laplace;
        n_ext += ev.d_extension;
        rep.max_abs_deficit = std::max(rep.max_abs_deficit, std::abs(n_laplace - n_ext));
        SpectrumRecord rec;
        rec.lambda = ev.lambda;
        rec.is_new = ev.pair != nullptr;
        if (ev.pair) {
            rec.multiplicity = 1;
            rec.d = ev.pair->d;
            rec.residual = ev.pair->residual;
            rep.records.push_back(rec);
        } else {
            rec.multiplicity = ev.d_extension;
            rep.records.push_back(rec);
        }
    }
    return rep;
}

std::string to_jsonl(const SpectrumReport& report) {
    std::string out;
    char buf[320];
    for (const auto& r : report.records) {
        std::snprintf(buf, sizeof buf,
                      "{\"lambda\": %.17g, \"kind\": \"%s\", \"multiplicity\": %d, "
                      "\"d\": [%.17g, %.17g, %.17g, %.17g], \"residual\": %.17g}\n",
                      r.lambda, r.is_new ? "new" : "old", r.multiplicity, r.d(0).real(),
                      r.d(0).imag(), r.d(1).real(), r.d(1).imag(), r.residual);
        out += buf;
    }
    return out;
}

}  // namespace scatterlab::scattering

#include "scatterlab/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace scatterlab::equidist {

namespace {

bool window_contains(const TruncatedState& state, const lattice::LatticePoint& xi,
                     std::size_t* index) {
    auto cmp = [](const StateEntry& e, const lattice::LatticePoint& p) { return e.xi < p; };
    const auto it = std::lower_bound(state.entries.begin(), state.entries.end(), xi, cmp);
    if (it == state.entries.end() || !(it->xi == xi)) return false;
    *index = static_cast<std::size_t>(it - state.entries.begin());
    return true;
}

cplx coefficient(const Eigen::Vector2cd& d, const TorusGeometry& geom,
                 const lattice::LatticePoint& xi) {
    return d(0) * std::polar(1.0, -geom.dual_dot(xi.xi1, xi.xi2, geom.x1)) +
           d(1) * std::polar(1.0, -geom.dual_dot(xi.xi1, xi.xi2, geom.x2));
}

}  // namespace

TruncatedState truncated_state(double lambda, const Eigen::Vector2cd& d,
                               const TorusGeometry& geom, const sieve::FilterParams& p,
                               std::optional<double> L_override) {
    if (std::abs(d.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("truncated_state: |d1|^2 + |d2|^2 must be 1");
    TruncatedState st;
    st.lambda = lambda;
    st.L = L_override.value_or(p.window_half_width(lambda));
    st.d = d;
    st.geom = geom;
    for (const auto& ap : lattice::annulus_points(lambda, st.L, geom.aspect_sq)) {
        const double denom = ap.norm - lambda;
        if (std::abs(denom) < 1e-9)
            throw singular_input_error("truncated_state: lambda on the Laplace spectrum");
        st.entries.push_back({ap.xi, ap.key, coefficient(d, geom, ap.xi), denom});
    }
    double acc = 0.0;
    for (const auto& e : st.entries) acc += std::norm(e.c) / (e.denom * e.denom);
    st.norm_sq_trunc = acc / kFourPiSq;
    st.empty_flagged = st.entries.empty();
    return st;
}

MatElem matrix_element(const TruncatedState& state, const lattice::LatticePoint& zeta) {
    MatElem out;
    if (zeta.xi1 == 0 && zeta.xi2 == 0) {
        double acc = 0.0;
        for (const auto& e : state.entries) acc += std::norm(e.c) / (e.denom * e.denom);
        out.value = acc / kFourPiSq;
        out.terms = state.entries.size();
        return out;
    }
    cplx acc{0.0, 0.0};
    for (const auto& e : state.entries) {
        const lattice::LatticePoint shifted{e.xi.xi1 + zeta.xi1, e.xi.xi2 + zeta.xi2};
        std::size_t j = 0;
        if (!window_contains(state, shifted, &j)) continue;
        const auto& f = state.entries[j];
        acc += e.c * std::conj(f.c) / (e.denom * f.denom);
        ++out.terms;
    }
    out.value = acc / kFourPiSq;
    return out;
}

MatElem matrix_element_normalized(const TruncatedState& state,
                                  const lattice::LatticePoint& zeta) {
    if (state.empty_flagged)
        throw std::invalid_argument("matrix_element_normalized: empty window");
    MatElem m = matrix_element(state, zeta);
    m.value /= state.norm_sq_trunc;
    return m;
}

PointTable PointTable::build(const TorusGeometry& geom, double cutoff) {
    PointTable t;
    t.geom = geom;
    t.cutoff = cutoff;
    const std::int64_t p = geom.aspect_sq.num, q = geom.aspect_sq.den;
    const std::int64_t den = lattice::key_den(geom.aspect_sq);
    const auto kmax = static_cast<std::int64_t>(std::floor(cutoff * static_cast<double>(den)));
    const double a = geom.aspect();
    const double w1 = a * geom.x0[0], w2 = geom.x0[1] / a;
    const auto m1 = static_cast<std::int64_t>(std::sqrt(static_cast<double>(kmax) /
                                                        static_cast<double>(p * p)));
    const cplx rot{std::cos(w2), std::sin(w2)};
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t base = p * p * x1 * x1;
        if (base > kmax) continue;
        const auto m2 = static_cast<std::int64_t>(
            std::sqrt(static_cast<double>(kmax - base) / static_cast<double>(q * q)));
        cplx z = std::polar(1.0, static_cast<double>(x1) * w1 - static_cast<double>(m2) * w2);
        for (std::int64_t x2 = -m2; x2 <= m2; ++x2) {
            const std::int64_t k = base + q * q * x2 * x2;
            if (k <= kmax) {
                t.xi1.push_back(static_cast<std::int32_t>(x1));
                t.xi2.push_back(static_cast<std::int32_t>(x2));
                t.key.push_back(k);
                t.cos_x0.push_back(z.real());
                t.sin_x0.push_back(z.imag());
            }
            z *= rot;
        }
    }
    return t;
}

FullSummer::FullSummer(const PointTable& table, double lambda, const Eigen::Vector2cd& d,
                       double R)
    : pts_(table), lambda_(lambda), d_(d), R_(R) {
    if (R > table.cutoff + 1e-9)
        throw std::invalid_argument("FullSummer: R beyond point-table cutoff");
    if (R < lambda + 1e5) throw std::invalid_argument("FullSummer: need R >= lambda + 1e5");
    if (std::abs(d.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("FullSummer: |d| must be 1");
    raw0_ = raw({0, 0}).real();
    if (!(raw0_ > 0.0)) throw singular_input_error("FullSummer: degenerate normalization");
}

cplx FullSummer::raw(const lattice::LatticePoint& zeta) const {
    const std::int64_t p = pts_.geom.aspect_sq.num, q = pts_.geom.aspect_sq.den;
    const std::int64_t den = lattice::key_den(pts_.geom.aspect_sq);
    const double dend = static_cast<double>(den);
    const std::int64_t zkey = lattice::norm_key(pts_.geom.aspect_sq, zeta.xi1, zeta.xi2);
    const std::int64_t c1 = 2 * p * p * zeta.xi1, c2 = 2 * q * q * zeta.xi2;

    // F(w) = sum e^{i<xi,w>} / ((n - lambda)(n' - lambda)) at w = 0, +-x0
    double f0 = 0.0, fc = 0.0, fs = 0.0;
    const std::size_t n = pts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double nv = static_cast<double>(pts_.key[i]) / dend;
        const double nshift =
            static_cast<double>(pts_.key[i] + c1 * pts_.xi1[i] + c2 * pts_.xi2[i] + zkey) / dend;
        const double inv = 1.0 / ((nv - lambda_) * (nshift - lambda_));
        f0 += inv;
        fc += pts_.cos_x0[i] * inv;
        fs += pts_.sin_x0[i] * inv;
    }
    const cplx fx0{fc, fs};
    const cplx e1 = std::polar(1.0, pts_.geom.dual_dot(zeta.xi1, zeta.xi2, pts_.geom.x1));
    const cplx e2 = std::polar(1.0, pts_.geom.dual_dot(zeta.xi1, zeta.xi2, pts_.geom.x2));
    return std::norm(d_(0)) * e1 * f0 + std::norm(d_(1)) * e2 * f0 +
           d_(0) * std::conj(d_(1)) * e2 * fx0 + d_(1) * std::conj(d_(0)) * e1 * std::conj(fx0);
}

cplx FullSummer::normalized(const lattice::LatticePoint& zeta) const {
    return raw(zeta) / raw0_;
}

double FullSummer::tail_bound() const { return 3.0 * kPi / (R_ - lambda_); }

FullElem matrix_element_full(double lambda, const Eigen::Vector2cd& d,
                             const lattice::LatticePoint& zeta, const TorusGeometry& geom,
                             double R) {
    const PointTable table = PointTable::build(geom, R);
    const FullSummer summer(table, lambda, d, R);
    return {summer.normalized(zeta), summer.tail_bound() / summer.raw0()};
}

cplx Observable::a_hat(const lattice::LatticePoint& zeta) const {
    for (const auto& [z, v] : coeffs)
        if (z == zeta) return v;
    return {0.0, 0.0};
}

Observable Observable::bundled(const TorusGeometry& geom) {
    Observable a;
    a.hermitian = true;
    for (const auto& ap : lattice::annulus_points(32.0, 32.0, geom.aspect_sq))
        a.coeffs.emplace_back(ap.xi, cplx{std::exp(-ap.norm), 0.0});
    return a;
}

Expectation observable_expectation(double lambda, const Eigen::Vector2cd& d, const Observable& a,
                                   ExpectationMode mode, const TorusGeometry& geom,
                                   const sieve::FilterParams& p, double R) {
    Expectation out;
    if (mode == ExpectationMode::Truncated) {
        const TruncatedState st = truncated_state(lambda, d, geom, p);
        if (st.empty_flagged) {
            out.empty_window = true;
            out.value = {0.0, 0.0};
            return out;
        }
        // spectral-window analysis: coefficients beyond |zeta| <= lambda^eps
        // are outside the truncated expansion and are dropped
        const double zeta_norm_cap = std::pow(lambda, 2.0 * p.epsilon);
        cplx acc{0.0, 0.0};
        for (const auto& [zeta, ahat] : a.coeffs) {
            if (zeta.xi1 == 0 && zeta.xi2 == 0) {
                acc += ahat;
                continue;
            }
            const double zn = lattice::norm_value(
                geom.aspect_sq, lattice::norm_key(geom.aspect_sq, zeta.xi1, zeta.xi2));
            if (zn > zeta_norm_cap) continue;
            acc += ahat * matrix_element_normalized(st, zeta).value;
        }
        out.value = acc;
        return out;
    }
    const PointTable table = PointTable::build(geom, R);
    const FullSummer summer(table, lambda, d, R);
    cplx acc{0.0, 0.0};
    for (const auto& [zeta, ahat] : a.coeffs) {
        if (zeta.xi1 == 0 && zeta.xi2 == 0) {
            acc += ahat;
            continue;
        }
        // hermitian observables pair zeta with -zeta as conjugates
        if (a.hermitian) {
            if (zeta.xi1 < 0 || (zeta.xi1 == 0 && zeta.xi2 < 0)) continue;
            acc += 2.0 * (ahat * summer.normalized(zeta)).real();
        } else {
            acc += ahat * summer.normalized(zeta);
        }
    }
    out.value = acc;
    return out;
}

std::pair<Eigen::Matrix2d, Eigen::Matrix2d> parseval_grams(double lambda,
                                                           const TorusGeometry& geom,
                                                           const sieve::FilterParams& p,
                                                           double R,
                                                           std::optional<double> L_override) {
    const double L = L_override.value_or(p.window_half_width(lambda));
    double wd = 0.0, wc = 0.0;
    for (const auto& ap : lattice::annulus_points(lambda, L, geom.aspect_sq)) {
        const double f = 1.0 / ((ap.norm - lambda) * (ap.norm - lambda));
        wd += f;
        wc += std::cos(geom.dual_dot(ap.xi.xi1, ap.xi.xi2, geom.x0)) * f;
    }
    const greens::ShellTable shells = greens::ShellTable::build(geom, R);
    double fd = 0.0, fc = 0.0;
    for (std::size_t i = 0; i < shells.norm.size(); ++i) {
        const double f = 1.0 / ((shells.norm[i] - lambda) * (shells.norm[i] - lambda));
        fd += shells.r2[i] * f;
        fc += shells.cos_x0[i] * f;
    }
    fd += kPi / (R - lambda);  // diagonal mean-density tail
    Eigen::Matrix2d w, fmat;
    w << wd, wc, wc, wd;
    fmat << fd, fc, fc, fd;
    return {w, fmat};
}

double truncation_gap(double lambda, const Eigen::Vector2cd& d, const TorusGeometry& geom,
                      const sieve::FilterParams& p, double R, std::optional<double> L_override) {
    if (std::abs(d.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("truncation_gap: |d| must be 1");
    const auto [w, f] = parseval_grams(lambda, geom, p, R, L_override);
    const double raw_trunc = (d.adjoint() * w.cast<cplx>() * d)(0).real();
    const double raw_full = (d.adjoint() * f.cast<cplx>() * d)(0).real();
    if (!(raw_full > 0.0)) throw singular_input_error("truncation_gap: degenerate full norm");
    const double ratio = std::min(1.0, raw_trunc / raw_full);
    return 2.0 - 2.0 * std::sqrt(ratio);
}

DecayResult decay_experiment(const std::vector<double>& lambdas, const Observable& a,
                             const TorusGeometry& geom, const lattice::NormTable& table,
                             const sieve::FilterParams& p, const DecayOptions& opt) {
    DecayResult res;
    res.rows.resize(lambdas.size());
    const cplx a0 = a.a_hat({0, 0});
    parallel_for(lambdas.size(), opt.threads, [&](std::size_t i) {
        const double lam = lambdas[i];
        DecayRow row;
        row.lambda = lam;
        row.in_linf = sieve::in_lambda_infinity(lam, geom, table, p);
        const double R = lam + opt.R_margin;
        const auto full = observable_expectation(lam, opt.d, a, ExpectationMode::Full, geom, p, R);
        const auto trunc =
            observable_expectation(lam, opt.d, a, ExpectationMode::Truncated, geom, p, R);
        row.dev_full = std::abs(full.value - a0);
        row.dev_trunc = std::abs(trunc.value - a0);
        row.empty_window = trunc.empty_window;
        row.norm_sq = greens::norm_sq(lam, opt.d, geom, R).value.real() * kSixteenPiFourth;
        row.window_size =
            static_cast<std::int64_t>(truncated_state(lam, opt.d, geom, p).entries.size());
        res.rows[i] = row;
    });
    // envelope fit over Lambda_inf members with nonzero deviation
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::int64_t n = 0;
    for (const auto& r : res.rows) {
        if (!r.in_linf || r.empty_window || r.dev_full <= 0.0) continue;
        const double x = std::log10(r.lambda), y = std::log10(r.dev_full);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    res.fit_count = n;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    res.fitted_exponent = (n >= 2 && denom != 0.0)
                              ? (static_cast<double>(n) * sxy - sx * sy) / denom
                              : 0.0;
    return res;
}

std::string to_csv(const DecayResult& result) {
    std::string out = "lambda,in_linf,dev_full,dev_trunc,norm_sq,window_size\n";
    char buf[224];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%lld\n", r.lambda,
                      r.in_linf ? 1 : 0, r.dev_full, r.dev_trunc, r.norm_sq,
                      static_cast<long long>(r.window_size));
        out += buf;
    }
    return out;
}

std::string to_plot_data(const DecayResult& result) {
    std::string out = "log10_lambda,log10_dev\n";
    char buf[96];
    for (const auto& r : result.rows) {
        if (r.dev_full <= 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", std::log10(r.lambda),
                      std::log10(r.dev_full));
        out += buf;
    }
    return out;
}

}  // namespace scatterlab::equidist

#include "scatterlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scatterlab::greens {

namespace {

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

std::int64_t isqrt64(std::int64_t v) {
    if (v < 0) return -1;
    auto t = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (t > 0 && t * t > v) --t;
    while ((t + 1) * (t + 1) <= v) ++t;
    return t;
}

// Dense per-key accumulation of point counts and cos(<xi,x0>) shell sums.
struct DensePass {
    std::int64_t kmax = 0;
    std::int64_t den = 1;
    std::vector<std::int32_t> cnt;
    std::vector<double> csum;
};

DensePass dense_shell_pass(const TorusGeometry& geom, double cutoff) {
    DensePass out;
    out.den = lattice::key_den(geom.aspect_sq);
    out.kmax = static_cast<std::int64_t>(std::floor(cutoff * static_cast<double>(out.den)));
    if (out.kmax < 0) out.kmax = -1;
    out.cnt.assign(static_cast<std::size_t>(out.kmax + 1), 0);
    out.csum.assign(static_cast<std::size_t>(out.kmax + 1), 0.0);

    const std::int64_t p = geom.aspect_sq.num, q = geom.aspect_sq.den;
    const double a = geom.aspect();
    const double w1 = a * geom.x0[0];      // phase step per unit xi1
    const double w2 = geom.x0[1] / a;      // phase step per unit xi2
    const std::int64_t m1 = isqrt64(out.kmax / (p * p));
    const cplx rot{std::cos(w2), std::sin(w2)};
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t base = p * p * x1 * x1;
        const std::int64_t m2 = isqrt64((out.kmax - base) / (q * q));
        // z = e^{i(x1*w1 + x2*w2)} via a rotation recurrence along the row
        cplx z = std::polar(1.0, static_cast<double>(x1) * w1 - static_cast<double>(m2) * w2);
        for (std::int64_t x2 = -m2; x2 <= m2; ++x2) {
            const auto key = static_cast<std::size_t>(base + q * q * x2 * x2);
            out.cnt[key] += 1;
            out.csum[key] += z.real();
            z *= rot;
        }
    }
    return out;
}

double max_abs(cplx a, cplx b) { return std::max(std::abs(a), std::abs(b)); }

// Reported tail bound for sum_{n>R} |lambda-mu| / (|n-mu||n-lambda|) with
// mean point density pi per unit norm.
double resolvent_tail_bound(cplx lambda, cplx mu, double R) {
    const double m = max_abs(lambda, mu);
    return std::abs(lambda - mu) / kFourPiSq * kPi / (R - m);
}

cplx diagonal_tail_correction(cplx lambda, cplx mu, double R) {
    return std::log((R - mu) / (R - lambda)) / (4.0 * kPi);
}

}  // namespace

ShellTable ShellTable::build(const TorusGeometry& geom, double cutoff) {
    DensePass pass = dense_shell_pass(geom, cutoff);
    ShellTable t;
    t.aspect_sq = geom.aspect_sq;
    t.cutoff = cutoff;
    for (std::int64_t k = 0; k <= pass.kmax; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (!pass.cnt[i]) continue;
        t.norm.push_back(static_cast<double>(k) / static_cast<double>(pass.den));
        t.r2.push_back(pass.cnt[i]);
        t.cos_x0.push_back(pass.csum[i]);
    }
    return t;
}

double ShellTable::spectrum_distance(double lambda) const {
    if (norm.empty()) return std::numeric_limits<double>::infinity();
    const auto it = std::lower_bound(norm.begin(), norm.end(), lambda);
    double d = std::numeric_limits<double>::infinity();
    if (it != norm.end()) d = std::min(d, std::abs(*it - lambda));
    if (it != norm.begin()) d = std::min(d, std::abs(*(it - 1) - lambda));
    return d;
}

SecularSums SecularSums::build(const TorusGeometry& geom, double cutoff, double split_norm) {
    if (split_norm > cutoff) throw std::invalid_argument("SecularSums: split beyond cutoff");
    DensePass pass = dense_shell_pass(geom, cutoff);
    SecularSums s;
    s.geom = geom;
    s.cutoff = cutoff;
    s.split_norm = split_norm;
    s.moments[0].assign(kMoments, 0.0);
    s.moments[1].assign(kMoments, 0.0);
    std::vector<Kahan> acc0(kMoments), acc1(kMoments);
    const double den = static_cast<double>(pass.den);
    for (std::int64_t k = 0; k <= pass.kmax; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (!pass.cnt[i]) continue;
        const double n = static_cast<double>(k) / den;
        if (n <= split_norm) {
            s.norm.push_back(n);
            s.r2.push_back(pass.cnt[i]);
            s.cos_x0.push_back(pass.csum[i]);
        } else {
            const double inv = 1.0 / n;
            double f = inv * inv;
            for (int pidx = 0; pidx < kMoments; ++pidx) {
                acc0[static_cast<std::size_t>(pidx)].add(pass.cnt[i] * f);
                acc1[static_cast<std::size_t>(pidx)].add(pass.csum[i] * f);
                f *= inv;
            }
        }
    }
    for (int pidx = 0; pidx < kMoments; ++pidx) {
        s.moments[0][static_cast<std::size_t>(pidx)] = acc0[static_cast<std::size_t>(pidx)].sum;
        s.moments[1][static_cast<std::size_t>(pidx)] = acc1[static_cast<std::size_t>(pidx)].sum;
    }
    return s;
}

double SecularSums::spectrum_distance(double lambda) const {
    const auto it = std::lower_bound(norm.begin(), norm.end(), lambda);
    double d = std::numeric_limits<double>::infinity();
    if (it != norm.end()) d = std::min(d, std::abs(*it - lambda));
    if (it != norm.begin()) d = std::min(d, std::abs(*(it - 1) - lambda));
    return d;
}

std::pair<double, double> SecularSums::gap_around(double lambda) const {
    const auto it = std::upper_bound(norm.begin(), norm.end(), lambda);
    if (it == norm.begin() || it == norm.end())
        throw std::invalid_argument("gap_around: lambda outside tabulated spectrum");
    return {*(it - 1), *it};
}

SummedValue SecularSums::eval(cplx lambda, cplx mu, Displacement w) const {
    if (lambda == mu) return {cplx{0.0, 0.0}, 0.0};
    if (max_abs(lambda, mu) > split_norm / 4.0)
        throw std::invalid_argument("SecularSums::eval: spectral parameter beyond split/4");
    if (std::abs(lambda.imag()) < 1e-14 && spectrum_distance(lambda.real()) < 1e-9)
        throw singular_input_error("SecularSums::eval: lambda on the Laplace spectrum");
    if (std::abs(mu.imag()) < 1e-14 && spectrum_distance(mu.real()) < 1e-9)
        throw singular_input_error("SecularSums::eval: mu on the Laplace spectrum");

    const std::vector<double>& weight = (w == Displacement::Zero) ? r2 : cos_x0;
    // head: per-shell absolutely convergent grouping
    cplx head{0.0, 0.0};
    const std::size_t m = norm.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double n = norm[i];
        head += weight[i] * (1.0 / (n - lambda) - 1.0 / (n - mu));
    }
    // tail over (split, cutoff]: (lambda-mu) sum_p h_p M_p with
    // h_p = sum_{j+k=p} lambda^j mu^k
    const auto& mom = moments[w == Displacement::Zero ? 0 : 1];
    cplx tail{0.0, 0.0};
    cplx h{1.0, 0.0}, mupow{1.0, 0.0};
    for (int pidx = 0; pidx < kMoments; ++pidx) {
        tail += h * mom[static_cast<std::size_t>(pidx)];
        mupow *= mu;
        h = lambda * h + mupow;
    }
    tail *= (lambda - mu);

    cplx value = (head + tail) / kFourPiSq;
    if (w == Displacement::Zero) value += diagonal_tail_correction(lambda, mu, cutoff);
    return {value, resolvent_tail_bound(lambda, mu, cutoff)};
}

SummedValue resolvent_diff(const TorusGeometry& geom, cplx lambda, cplx mu,
                           const Eigen::Vector2d& w, double R) {
    if (lambda == mu) return {cplx{0.0, 0.0}, 0.0};
    if (R <= 4.0 * std::max(max_abs(lambda, mu), 1.0))
        throw std::invalid_argument("resolvent_diff: cutoff too small");
    for (cplx s : {lambda, mu}) {
        if (std::abs(s.imag()) < 1e-14) {
            const double sr = s.real();
            if (!lattice::annulus_points(sr, std::max(1e-9, 1e-12 * std::abs(sr)), geom.aspect_sq)
                     .empty())
                throw singular_input_error("resolvent_diff: spectral parameter on the spectrum");
        }
    }

    const std::int64_t p = geom.aspect_sq.num, q = geom.aspect_sq.den;
    const std::int64_t den = lattice::key_den(geom.aspect_sq);
    const auto kmax = static_cast<std::int64_t>(std::floor(R * static_cast<double>(den)));
    const double a = geom.aspect();
    const double w1 = a * w[0], w2 = w[1] / a;
    const std::int64_t m1 = isqrt64(kmax / (p * p));
    const cplx rot{std::cos(w2), std::sin(w2)};

    Kahan re, im;
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t base = p * p * x1 * x1;
        const std::int64_t m2 = isqrt64((kmax - base) / (q * q));
        cplx z = std::polar(1.0, static_cast<double>(x1) * w1 - static_cast<double>(m2) * w2);
        for (std::int64_t x2 = -m2; x2 <= m2; ++x2) {
            const double n = static_cast<double>(base + q * q * x2 * x2) / static_cast<double>(den);
            const cplx term = z * (1.0 / (n - lambda) - 1.0 / (n - mu));
            re.add(term.real());
            im.add(term.imag());
            z *= rot;
        }
    }
    cplx value = cplx{re.sum, im.sum} / kFourPiSq;
    if (w.norm() < 1e-15) value += diagonal_tail_correction(lambda, mu, R);
    return {value, resolvent_tail_bound(lambda, mu, R)};
}

DeficiencyConstants deficiency_constants(const TorusGeometry& geom, double R,
                                         const DeficiencyOptions& opt) {
    if (R < 1e4) throw std::invalid_argument("deficiency_constants: R must be >= 1e4");
    TorusGeometry g = geom;
    if (!opt.allow_coincident && g.x0.norm() < 1e-12)
        throw std::invalid_argument("deficiency_constants: coincident scatterers");

    // Pass 1: direct point enumeration.
    const std::int64_t p = g.aspect_sq.num, q = g.aspect_sq.den;
    const std::int64_t den = lattice::key_den(g.aspect_sq);
    const auto kmax = static_cast<std::int64_t>(std::floor(R * static_cast<double>(den)));
    const double a = g.aspect();
    const double w1 = a * g.x0[0], w2 = g.x0[1] / a;
    const std::int64_t m1 = isqrt64(kmax / (p * p));
    const cplx rot{std::cos(w2), std::sin(w2)};
    Kahan s1, s2;
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t base = p * p * x1 * x1;
        const std::int64_t m2 = isqrt64((kmax - base) / (q * q));
        cplx z = std::polar(1.0, static_cast<double>(x1) * w1 - static_cast<double>(m2) * w2);
        for (std::int64_t x2 = -m2; x2 <= m2; ++x2) {
            const double n = static_cast<double>(base + q * q * x2 * x2) / static_cast<double>(den);
            const double f = 1.0 / (n * n + 1.0);
            s1.add(f);
            s2.add(z.real() * f);
            z *= rot;
        }
    }
    DeficiencyConstants c;
    c.cutoff_used = R;
    c.tail_bound = kPi / R / kSixteenPiFourth;
    // diagonal mean-density tail correction: pi * int_R^inf dn/(n^2+1)
    c.c1 = (s1.sum + kPi * (kPi / 2.0 - std::atan(R))) / kSixteenPiFourth;
    c.c2 = s2.sum / kSixteenPiFourth;

    // Pass 2: independent shell-aggregated route for Im G_i.
    const ShellTable shells = ShellTable::build(g, R);
    Kahan g1, g2;
    for (std::size_t i = 0; i < shells.norm.size(); ++i) {
        const double f = 1.0 / (shells.norm[i] * shells.norm[i] + 1.0);
        g1.add(shells.r2[i] * f);
        g2.add(shells.cos_x0[i] * f);
    }
    const double im_gi_0 = -(g1.sum + kPi * (kPi / 2.0 - std::atan(R))) / kFourPiSq;
    const double im_gi_x0 = -g2.sum / kFourPiSq;
    c.identity_rel_err_c1 = std::abs(im_gi_0 + kFourPiSq * c.c1) / std::abs(kFourPiSq * c.c1);
    c.identity_rel_err_c2 = std::abs(im_gi_x0 + kFourPiSq * c.c2) /
                            std::max(std::abs(kFourPiSq * c.c2), 1e-30);
    if (c.identity_rel_err_c1 > opt.identity_rel_tol ||
        c.identity_rel_err_c2 > opt.identity_rel_tol)
        throw std::runtime_error("deficiency_constants: Im G_i identity check failed");

    if (!opt.allow_coincident && !(c.c1 > std::abs(c.c2)))
        throw std::runtime_error("deficiency_constants: Cauchy-Schwarz violated (c1 <= |c2|)");
    return c;
}

Eigen::Matrix2d mixing_matrix(const DeficiencyConstants& c) {
    const double c1 = c.c1, c2 = c.c2;
    if (!(c1 > std::abs(c2))) throw degenerate_gram_error("mixing_matrix: c1 <= |c2|");
    const double disc = c1 * c1 - c2 * c2;
    Eigen::Matrix2d t;
    t << 1.0 / std::sqrt(c1), 0.0,
        -c2 / std::sqrt(c1 * disc), std::sqrt(c1 / disc);
    return t;
}

SummedValue norm_sq(double lambda, const Eigen::Vector2cd& d, const ShellTable& table, double R) {
    const Eigen::Matrix2d h = norm_sq_matrix(lambda, table, R);
    if (std::abs(d.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("norm_sq: coefficients must satisfy |d1|^2+|d2|^2 = 1");
    const double value = (d.adjoint() * h * d)(0).real();
    return {cplx{value, 0.0}, 2.0 * kPi / (R - lambda) / kSixteenPiFourth};
}

Eigen::Matrix2d norm_sq_matrix(double lambda, const ShellTable& table, double R) {
    if (R > table.cutoff + 1e-9) throw std::invalid_argument("norm_sq: R beyond table cutoff");
    if (R < lambda + 1e4) throw std::invalid_argument("norm_sq: need R >= lambda + 1e4");
    if (table.spectrum_distance(lambda) < 1e-9)
        throw singular_input_error("norm_sq: lambda on the Laplace spectrum");
    Kahan diag, cross;
    for (std::size_t i = 0; i < table.norm.size(); ++i) {
        const double n = table.norm[i];
        if (n > R) break;
        const double f = 1.0 / ((n - lambda) * (n - lambda));
        diag.add(table.r2[i] * f);
        cross.add(table.cos_x0[i] * f);
    }
    const double adiag = (diag.sum + kPi / (R - lambda)) / kSixteenPiFourth;
    const double across = cross.sum / kSixteenPiFourth;
    Eigen::Matrix2d h;
    h << adiag, across, across, adiag;
    return h;
}

SummedValue norm_sq(double lambda, const Eigen::Vector2cd& d, const TorusGeometry& geom, double R) {
    return norm_sq(lambda, d, ShellTable::build(geom, R), R);
}

}  // namespace scatterlab::greens

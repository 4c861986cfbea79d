#include "scatterlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scatterlab/verify.hpp"

namespace scatterlab::sieve {

namespace {

double dist_to_int(double t) {
    return std::abs(t - std::round(t));
}

// max_j |sin(xi_phys,j alpha_j)| for a shell point
double big_sin(const lattice::LatticePoint& xi, const TorusGeometry& geom) {
    const double a = geom.aspect();
    const double s1 = std::sin(a * static_cast<double>(xi.xi1) * geom.x0[0]);
    const double s2 = std::sin(static_cast<double>(xi.xi2) * geom.x0[1] / a);
    return std::max(std::abs(s1), std::abs(s2));
}

}  // namespace

void FilterParams::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 0.05))
        throw std::invalid_argument("FilterParams: epsilon must lie in (0, 1/20]");
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("FilterParams: delta must lie in (0, 1/4)");
    if (!(C1 > 0.0) || !(c2_low > 0.0))
        throw std::invalid_argument("FilterParams: constants must be positive");
    if (zeta_mode == ZetaRadiusMode::Fixed && !(fixed_zeta_radius >= 0.0))
        throw std::invalid_argument("FilterParams: bad fixed zeta radius");
}

double FilterParams::window_half_width(double lambda) const { return std::pow(lambda, delta); }

double FilterParams::zeta_radius(double lambda) const {
    return zeta_mode == ZetaRadiusMode::LambdaEps ? std::pow(lambda, epsilon) : fixed_zeta_radius;
}

DiophantineReport estimate_type(const Eigen::Vector2d& alpha, std::int64_t Q) {
    if (Q < 1000) throw std::invalid_argument("estimate_type: Q must be >= 1e3");
    DiophantineReport rep;
    rep.alpha = alpha;
    rep.Q = Q;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t q = 1; q <= Q; ++q) {
        const double m = std::max(dist_to_int(q * alpha[0]), dist_to_int(q * alpha[1]));
        // floating "exact zero": q*alpha rounds onto an integer to within the
        // accumulated representation error
        if (m <= 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(q)) {
            rep.rational_flag = true;
            rep.rational_q = q;
            rep.kappa_hat = std::numeric_limits<double>::infinity();
            return rep;
        }
        if (m < best) {
            best = m;
            rep.records.push_back({q, m});
        }
    }
    // least-squares slope of log m against log q over the envelope records
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(rep.records.size());
    for (const auto& r : rep.records) {
        const double x = std::log(static_cast<double>(r.q));
        const double y = std::log(r.m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    rep.kappa_hat = std::max(1.5, 1.0 - slope);  // Dirichlet floor
    return rep;
}

bool filter_lambda1(double lambda, const lattice::NormTable& table, const FilterParams& p) {
    if (lambda <= 1.0) return false;
    const auto nl = lattice::n_lambda(lambda, table);
    return lambda - nl.norm <= p.C1 * std::pow(lambda, p.epsilon);
}

bool filter_lambda2(double lambda, const TorusGeometry& geom, const lattice::NormTable& table,
                    const FilterParams& p) {
    const auto nl = lattice::n_lambda(lambda, table);
    if (nl.key == 0) return false;
    const double threshold = p.c2_low * std::pow(lambda, -p.epsilon);
    for (const auto& xi : lattice::shell_points(geom.aspect_sq, nl.key))
        if (big_sin(xi, geom) < threshold) return false;
    return true;
}

bool in_S_zeta(const lattice::LatticePoint& xi, const lattice::LatticePoint& zeta,
               const Rational& aspect_sq, double delta) {
    if (zeta.xi1 == 0 && zeta.xi2 == 0)
        throw std::invalid_argument("in_S_zeta: zeta must be nonzero");
    const std::int64_t pp = aspect_sq.num, qq = aspect_sq.den;
    // <xi, zeta> = (p^2 xi1 zeta1 + q^2 xi2 zeta2) / (p q), exactly
    const std::int64_t dot_num = pp * pp * xi.xi1 * zeta.xi1 + qq * qq * xi.xi2 * zeta.xi2;
    const double dot = static_cast<double>(std::abs(dot_num)) /
                       static_cast<double>(lattice::key_den(aspect_sq));
    const double n = lattice::norm_value(aspect_sq, lattice::norm_key(aspect_sq, xi.xi1, xi.xi2));
    return dot <= 2.0 * std::pow(n, delta);
}

bool in_lambda_zeta(double lambda, const lattice::LatticePoint& zeta, const TorusGeometry& geom,
                    const FilterParams& p) {
    const double L = p.window_half_width(lambda);
    for (const auto& ap : lattice::annulus_points(lambda, L, geom.aspect_sq))
        if (in_S_zeta(ap.xi, zeta, geom.aspect_sq, p.delta)) return false;
    return true;
}

std::vector<lattice::LatticePoint> zeta_range(double lambda, const TorusGeometry& geom,
                                              const FilterParams& p) {
    std::vector<lattice::LatticePoint> out;
    const double r = p.zeta_radius(lambda);
    if (r < 0.0 || !(r * r > 0.0)) return out;
    const double r2 = r * r;
    for (const auto& ap : lattice::annulus_points(r2 / 2.0, r2 / 2.0, geom.aspect_sq)) {
        const auto& z = ap.xi;
        if (z.xi1 == 0 && z.xi2 == 0) continue;
        if (z.xi1 < 0 || (z.xi1 == 0 && z.xi2 < 0)) continue;  // one of each +-zeta pair
        out.push_back(z);
    }
    return out;
}

bool in_lambda_infinity(double lambda, const TorusGeometry& geom, const lattice::NormTable& table,
                        const FilterParams& p, bool skip_prime_gate) {
    if (!skip_prime_gate && !filter_lambda_prime(lambda, geom, table, p)) return false;
    const double L = p.window_half_width(lambda);
    const auto annulus = lattice::annulus_points(lambda, L, geom.aspect_sq);
    for (const auto& z : zeta_range(lambda, geom, p)) {
        for (const auto& ap : annulus)
            if (in_S_zeta(ap.xi, z, geom.aspect_sq, p.delta)) return false;
    }
    return true;
}

bool window_disjointness(double lambda, const lattice::LatticePoint& zeta,
                         const TorusGeometry& geom, const FilterParams& p) {
    const double L = p.window_half_width(lambda);
    const double zeta_norm =
        lattice::norm_value(geom.aspect_sq, lattice::norm_key(geom.aspect_sq, zeta.xi1, zeta.xi2));
    if (zeta_norm > L)
        throw std::invalid_argument("window_disjointness: need |zeta|^2 <= lambda^delta");
    if (!in_lambda_zeta(lambda, zeta, geom, p))
        throw std::invalid_argument("window_disjointness: lambda not in Lambda_zeta");
    for (const auto& ap : lattice::annulus_points(lambda, L, geom.aspect_sq)) {
        const double shifted = lattice::norm_value(
            geom.aspect_sq,
            lattice::norm_key(geom.aspect_sq, ap.xi.xi1 + zeta.xi1, ap.xi.xi2 + zeta.xi2));
        if (std::abs(shifted - lambda) <= L) return false;
    }
    return true;
}

std::vector<double> gap_midpoints(const lattice::NormTable& table, double lo, double hi) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < table.entries.size(); ++i) {
        const double mid = 0.5 * (table.entries[i].norm + table.entries[i + 1].norm);
        if (mid >= lo && mid <= hi) out.push_back(mid);
    }
    return out;
}

std::vector<DensityRow> density_report(const std::vector<double>& lambda0, double X,
                                       const TorusGeometry& geom,
                                       const lattice::NormTable& table, const FilterParams& p,
                                       const DensityOptions& opt) {
    p.validate();
    std::vector<double> base;
    for (double v : lambda0)
        if (v <= X) base.push_back(v);
    std::sort(base.begin(), base.end());

    std::vector<double> norms;
    norms.reserve(table.entries.size());
    for (const auto& e : table.entries) norms.push_back(e.norm);
    const auto rep = verify::weak_interlacing(base, norms);
    if (!rep.pass(opt.interlace_C))
        throw std::invalid_argument("density_report: base set is not weakly interlacing");

    struct Flags {
        bool l1 = false, l2 = false, linf = false;
    };
    std::vector<Flags> flags(base.size());
    parallel_for(base.size(), opt.threads, [&](std::size_t i) {
        const double lam = base[i];
        Flags f;
        f.l1 = filter_lambda1(lam, table, p);
        f.l2 = lam > 1.0 && filter_lambda2(lam, geom, table, p);
        f.linf = (f.l1 && f.l2) ? in_lambda_infinity(lam, geom, table, p, true) : false;
        flags[i] = f;
    });

    std::vector<DensityRow> rows;
    auto block_of = [&](double v) -> std::size_t {
        if (v < opt.block_start) return 0;
        std::size_t b = 1;
        double edge = opt.block_start * 2.0;
        while (v >= edge) {
            edge *= 2.0;
            ++b;
        }
        return b;
    };
    std::size_t nblocks = 1;
    for (double v : base) nblocks = std::max(nblocks, block_of(v) + 1);
    rows.resize(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
        rows[b].block_lo = b == 0 ? 0.0 : opt.block_start * std::pow(2.0, static_cast<double>(b - 1));
        rows[b].block_hi = std::min(X, opt.block_start * std::pow(2.0, static_cast<double>(b)));
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto& r = rows[block_of(base[i])];
        ++r.count_base;
        if (flags[i].l1) ++r.count_l1;
        if (flags[i].l2) ++r.count_l2;
        if (flags[i].l1 && flags[i].l2) ++r.count_lprime;
        if (flags[i].linf) ++r.count_linf;
    }
    return rows;
}

std::string to_csv(const std::vector<DensityRow>& rows) {
    std::string out = "block_lo,block_hi,count_base,count_l1,count_l2,count_lprime,count_linf\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%lld,%lld,%lld,%lld\n", r.block_lo,
                      r.block_hi, static_cast<long long>(r.count_base),
                      static_cast<long long>(r.count_l1), static_cast<long long>(r.count_l2),
                      static_cast<long long>(r.count_lprime),
                      static_cast<long long>(r.count_linf));
        out += buf;
    }
    return out;
}

}  // namespace scatterlab::sieve

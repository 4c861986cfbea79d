#include "scatterlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scatterlab::lattice {

namespace {

// Largest t >= 0 with t*t <= v (exact integer sqrt on the relevant range).
std::int64_t isqrt(std::int64_t v) {
    if (v < 0) return -1;
    auto t = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (t > 0 && t * t > v) --t;
    while ((t + 1) * (t + 1) <= v) ++t;
    return t;
}

// xi1 range for keys <= K: p^2 xi1^2 <= K.
std::int64_t xi1_max_for_key(const Rational& aspect_sq, std::int64_t K) {
    return isqrt(K / (aspect_sq.num * aspect_sq.num));
}
std::int64_t xi2_max_for_key(const Rational& aspect_sq, std::int64_t K) {
    return isqrt(K / (aspect_sq.den * aspect_sq.den));
}

}  // namespace

std::size_t NormTable::index_below(double lambda) const {
    // strictly below: first entry with norm >= lambda, step back one
    std::size_t lo = 0, hi = entries.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (entries[mid].norm < lambda) lo = mid + 1; else hi = mid;
    }
    return lo == 0 ? npos : lo - 1;
}

std::pair<std::size_t, std::size_t> NormTable::range(double nmin, double nmax) const {
    auto cmp = [](const NormEntry& e, double v) { return e.norm < v; };
    const auto lo = std::lower_bound(entries.begin(), entries.end(), nmin, cmp);
    auto hi = lo;
    while (hi != entries.end() && hi->norm <= nmax) ++hi;
    return {static_cast<std::size_t>(lo - entries.begin()),
            static_cast<std::size_t>(hi - entries.begin())};
}

NormTable sieve_norms(double X, const Rational& aspect_sq) {
    if (!aspect_sq.positive()) throw std::invalid_argument("sieve_norms: aspect_sq must be positive");
    if (X < 0) throw std::invalid_argument("sieve_norms: negative cutoff");

    const std::int64_t den = key_den(aspect_sq);
    // keys run up to floor(X * den); norm <= X <=> key <= X*den exactly
    const auto kmax = static_cast<std::int64_t>(std::floor(X * static_cast<double>(den)));

    NormTable table;
    table.aspect_sq = aspect_sq;
    table.cutoff = X;
    if (kmax < 0) return table;

    std::vector<std::int32_t> mult(static_cast<std::size_t>(kmax) + 1, 0);
    const std::int64_t p = aspect_sq.num, q = aspect_sq.den;
    const std::int64_t m1 = xi1_max_for_key(aspect_sq, kmax);
    for (std::int64_t x1 = 0; x1 <= m1; ++x1) {
        const std::int64_t rem = kmax - p * p * x1 * x1;
        const std::int64_t m2 = isqrt(rem / (q * q));
        const std::int32_t w1 = x1 > 0 ? 2 : 1;
        for (std::int64_t x2 = 0; x2 <= m2; ++x2) {
            const std::int64_t key = p * p * x1 * x1 + q * q * x2 * x2;
            mult[static_cast<std::size_t>(key)] += w1 * (x2 > 0 ? 2 : 1);
        }
    }
    for (std::int64_t k = 0; k <= kmax; ++k) {
        if (mult[static_cast<std::size_t>(k)]) {
            table.entries.push_back({k, norm_value(aspect_sq, k), mult[static_cast<std::size_t>(k)]});
        }
    }
    return table;
}

std::vector<LatticePoint> circle_points(std::int64_t n) {
    return shell_points(Rational{1, 1}, n);
}

std::vector<LatticePoint> shell_points(const Rational& aspect_sq, std::int64_t key) {
    std::vector<LatticePoint> pts;
    if (key < 0) return pts;
    if (key == 0) return {LatticePoint{0, 0}};
    const std::int64_t p = aspect_sq.num, q = aspect_sq.den;
    const std::int64_t m1 = xi1_max_for_key(aspect_sq, key);
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t rem = key - p * p * x1 * x1;
        if (rem < 0) continue;
        const std::int64_t r = rem / (q * q);
        if (r * q * q != rem) continue;
        const std::int64_t x2 = isqrt(r);
        if (x2 < 0 || x2 * x2 != r) continue;
        if (x2 == 0) {
            pts.push_back({x1, 0});
        } else {
            pts.push_back({x1, -x2});
            pts.push_back({x1, x2});
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

std::vector<AnnulusPoint> annulus_points(double lambda, double L, const Rational& aspect_sq) {
    if (L <= 0) throw std::invalid_argument("annulus_points: L must be positive");
    std::vector<AnnulusPoint> pts;
    const double hi = lambda + L;
    if (hi < 0) return pts;
    const std::int64_t den = key_den(aspect_sq);
    // key in [ceil((lambda-L)*den), floor((lambda+L)*den)]
    const double lo = lambda - L;
    const auto klo = static_cast<std::int64_t>(std::ceil(std::max(0.0, lo) * static_cast<double>(den)));
    const auto khi = static_cast<std::int64_t>(std::floor(hi * static_cast<double>(den)));
    if (khi < klo) return pts;

    const std::int64_t p = aspect_sq.num, q = aspect_sq.den;
    const std::int64_t m1 = xi1_max_for_key(aspect_sq, khi);
    for (std::int64_t x1 = -m1; x1 <= m1; ++x1) {
        const std::int64_t base = p * p * x1 * x1;
        const std::int64_t remhi = khi - base;
        if (remhi < 0) continue;
        const std::int64_t m2 = isqrt(remhi / (q * q));
        // only the |x2| band with key in [klo, khi]
        std::int64_t x2lo = 0;
        if (klo > base) {
            const std::int64_t remlo = klo - base;
            x2lo = isqrt((remlo - 1) / (q * q));
            while (base + q * q * x2lo * x2lo < klo) ++x2lo;
        }
        for (std::int64_t x2 = x2lo; x2 <= m2; ++x2) {
            const std::int64_t key = base + q * q * x2 * x2;
            const double nv = norm_value(aspect_sq, key);
            if (std::abs(nv - lambda) <= L) {
                pts.push_back({{x1, x2}, key, nv});
                if (x2 > 0) pts.push_back({{x1, -x2}, key, nv});
            }
        }
    }
    std::sort(pts.begin(), pts.end(), [](const AnnulusPoint& a, const AnnulusPoint& b) {
        return a.xi < b.xi;
    });
    return pts;
}

NormEntry n_lambda(double lambda, const NormTable& table) {
    if (lambda <= 0) throw std::invalid_argument("n_lambda: lambda must be positive");
    if (table.cutoff < lambda) throw std::invalid_argument("n_lambda: table does not cover lambda");
    const std::size_t i = table.index_below(lambda);
    if (i == NormTable::npos) throw std::invalid_argument("n_lambda: no norm below lambda");
    return table.entries[i];
}

std::string to_csv(const NormTable& table) {
    std::string out = "norm,multiplicity\n";
    char buf[64];
    for (const auto& e : table.entries) {
        if (e.key % key_den(table.aspect_sq) == 0) {
            std::snprintf(buf, sizeof buf, "%lld,%d\n",
                          static_cast<long long>(e.key / key_den(table.aspect_sq)), e.mult);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%d\n", e.norm, e.mult);
        }
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "# fnv1a %016llx\n",
                  static_cast<unsigned long long>(fnv1a(out)));
    out += buf;
    return out;
}

NormTable from_csv(const std::string& text, const Rational& aspect_sq, double cutoff) {
    const auto tail = text.rfind("# fnv1a ");
    if (tail == std::string::npos) throw std::runtime_error("norm cache: missing checksum");
    const std::string body = text.substr(0, tail);
    const std::string sumline = text.substr(tail);
    unsigned long long want = 0;
    if (std::sscanf(sumline.c_str(), "# fnv1a %llx", &want) != 1 || want != fnv1a(body))
        throw std::runtime_error("norm cache: checksum mismatch");

    NormTable table;
    table.aspect_sq = aspect_sq;
    table.cutoff = cutoff;
    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line) || line != "norm,multiplicity")
        throw std::runtime_error("norm cache: bad header");
    const double den = static_cast<double>(key_den(aspect_sq));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double nv = 0;
        int mult = 0;
        if (std::sscanf(line.c_str(), "%lg,%d", &nv, &mult) != 2)
            throw std::runtime_error("norm cache: bad row");
        const auto key = static_cast<std::int64_t>(std::llround(nv * den));
        table.entries.push_back({key, norm_value(aspect_sq, key), mult});
    }
    return table;
}

}  // namespace scatterlab::lattice

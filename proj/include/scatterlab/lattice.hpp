#ifndef SCATTERLAB_LATTICE_HPP
#define SCATTERLAB_LATTICE_HPP

#include <cstdint>
#include <vector>

#include "scatterlab/common.hpp"

namespace scatterlab::lattice {

// Dual-lattice index pair. On the square torus the physical vector is
// (xi1, xi2); on the rectangular torus it is (a*xi1, xi2/a).
struct LatticePoint {
    std::int64_t xi1 = 0;
    std::int64_t xi2 = 0;
    bool operator==(const LatticePoint&) const = default;
    bool operator<(const LatticePoint& o) const {
        return xi1 != o.xi1 ? xi1 < o.xi1 : xi2 < o.xi2;
    }
};

// Exact integer key for the norm a^2 xi1^2 + xi2^2 / a^2 with a^2 = p/q:
//   norm = (p^2 xi1^2 + q^2 xi2^2) / (p q),
// so distinct rational norms have distinct keys and collisions between
// different (|xi1|, |xi2|) classes are resolved exactly.
inline std::int64_t norm_key(const Rational& aspect_sq, std::int64_t xi1, std::int64_t xi2) {
    const std::int64_t p = aspect_sq.num, q = aspect_sq.den;
    return p * p * xi1 * xi1 + q * q * xi2 * xi2;
}
inline std::int64_t key_den(const Rational& aspect_sq) { return aspect_sq.num * aspect_sq.den; }
inline double norm_value(const Rational& aspect_sq, std::int64_t key) {
    return static_cast<double>(key) / static_cast<double>(key_den(aspect_sq));
}

struct NormEntry {
    std::int64_t key = 0;  // norm * (p*q), exact
    double norm = 0.0;
    std::int32_t mult = 0;  // number of lattice points with this norm
};

// Sorted Laplace spectrum of the torus up to a cutoff, with multiplicities.
// Entry 0 is always the zero mode (norm 0, multiplicity 1); consumers that
// need 0 != lambda skip it explicitly.
struct NormTable {
    Rational aspect_sq = Rational{1, 1};
    double cutoff = 0.0;
    std::vector<NormEntry> entries;  // strictly increasing in key

    std::size_t size() const { return entries.size(); }
    // Index of the largest entry with norm < lambda, or npos if none.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_below(double lambda) const;
    // Index range [lo, hi) of entries with norm in [nmin, nmax].
    std::pair<std::size_t, std::size_t> range(double nmin, double nmax) const;
};

// Enumerate all distinct norms <= X with exact multiplicities.
// Pure and deterministic; direct double loop over xi1 with a per-xi1 xi2 range.
NormTable sieve_norms(double X, const Rational& aspect_sq);

// All xi with xi1^2 + xi2^2 = n on the square torus, in lexicographic order.
// Empty when n is not a sum of two squares.
std::vector<LatticePoint> circle_points(std::int64_t n);

// All xi with norm_key(xi) == key, lexicographic. Works for any aspect.
std::vector<LatticePoint> shell_points(const Rational& aspect_sq, std::int64_t key);

struct AnnulusPoint {
    LatticePoint xi;
    std::int64_t key = 0;
    double norm = 0.0;
};

// Exactly the lattice points with |norm(xi) - lambda| <= L, lexicographic.
std::vector<AnnulusPoint> annulus_points(double lambda, double L, const Rational& aspect_sq);

// The largest tabulated norm strictly below lambda. Requires lambda > 0 and
// table coverage of [0, lambda].
NormEntry n_lambda(double lambda, const NormTable& table);

// Serialize / parse the cache CSV (`norm,multiplicity` header, 17 significant
// digits, trailing `# fnv1a <hex>` checksum line).
std::string to_csv(const NormTable& table);
NormTable from_csv(const std::string& text, const Rational& aspect_sq, double cutoff);

}  // namespace scatterlab::lattice

#endif

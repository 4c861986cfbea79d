#ifndef SCATTERLAB_COMMON_HPP
#define SCATTERLAB_COMMON_HPP

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace scatterlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPiSq = 4.0 * kPi * kPi;           // torus volume
inline constexpr double kSixteenPiFourth = kFourPiSq * kFourPiSq;

// Thrown when a spectral parameter sits on (or within 1e-9 of) a Laplace
// eigenvalue, where the lattice sums are singular.
struct singular_input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by mixing_matrix when the Gram matrix [[c1,c2],[c2,c1]] is not
// positive definite (c1 <= |c2|).
struct degenerate_gram_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a secular evaluation is requested closer to a gap endpoint
// than the allowed margin; callers should refine adaptively.
struct near_singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduced fraction p/q with q > 0. Used for the squared aspect ratio a^2,
// so that rectangular norms a^2 m^2 + k^2/a^2 can be keyed exactly by the
// integer p^2 m^2 + q^2 k^2 (common denominator p*q).
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static Rational make(std::int64_t p, std::int64_t q) {
        if (q == 0) throw std::invalid_argument("Rational: zero denominator");
        if (q < 0) { p = -p; q = -q; }
        const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
        return Rational{g ? p / g : p, g ? q / g : q};
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool positive() const { return num > 0; }
    bool operator==(const Rational&) const = default;
};

// Deterministic parallel map: results land at their index, so the output is
// identical to the serial loop regardless of thread count. The first worker
// exception is rethrown after the join.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(t);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned k = 0; k < t; ++k) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline unsigned default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// FNV-1a, used for config hashing and cache checksums.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace scatterlab

#endif

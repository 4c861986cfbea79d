#ifndef SCATTERLAB_SIEVE_HPP
#define SCATTERLAB_SIEVE_HPP

#include <Eigen/Dense>

#include "scatterlab/geometry.hpp"
#include "scatterlab/lattice.hpp"

namespace scatterlab::sieve {

enum class ZetaRadiusMode { LambdaEps, Fixed };

// The filter constants: epsilon and delta are the asymptotic exponents
// (delta = 1/4 - epsilon by default), C1 and c2_low expose the implicit
// constants of the Lambda1 / Lambda2 filters as experimental dials.
struct FilterParams {
    double epsilon = 0.05;           // in (0, 1/20]
    double delta = 0.25 - 0.05;      // in (0, 1/4)
    double C1 = 1.0;
    double c2_low = 0.5;
    ZetaRadiusMode zeta_mode = ZetaRadiusMode::LambdaEps;
    double fixed_zeta_radius = 0.0;

    void validate() const;
    double window_half_width(double lambda) const;  // L = lambda^delta
    double zeta_radius(double lambda) const;
};

inline FilterParams default_params() { return FilterParams{}; }

struct DiophantineReport {
    Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
    std::int64_t Q = 0;
    struct Record {
        std::int64_t q = 0;
        double m = 0.0;  // max_j || q alpha_j ||
    };
    std::vector<Record> records;  // record-setting minima of m(q)
    double kappa_hat = 0.0;       // fitted type, floored at 3/2
    bool rational_flag = false;
    std::int64_t rational_q = 0;
};

// Brute force over 1 <= q <= Q of m(q) = max_j || q alpha_j ||; kappa_hat
// comes from the lower envelope of log m against log q.
DiophantineReport estimate_type(const Eigen::Vector2d& alpha, std::int64_t Q);

// Lambda1: lambda - n_lambda <= C1 lambda^epsilon.
bool filter_lambda1(double lambda, const lattice::NormTable& table, const FilterParams& p);

// Lambda2: every xi on the n_lambda shell satisfies
// max_j |sin(xi_phys,j alpha_j)| >= c2_low lambda^{-epsilon}. False when
// n_lambda = 0 (the only shell point is the origin).
bool filter_lambda2(double lambda, const TorusGeometry& geom, const lattice::NormTable& table,
                    const FilterParams& p);

inline bool filter_lambda_prime(double lambda, const TorusGeometry& geom,
                                const lattice::NormTable& table, const FilterParams& p) {
    return filter_lambda1(lambda, table, p) && filter_lambda2(lambda, geom, table, p);
}

// S_zeta membership: |<xi, zeta>| <= 2 |xi|^{2 delta} (= 2 norm(xi)^delta),
// with the inner product evaluated exactly in rational arithmetic.
bool in_S_zeta(const lattice::LatticePoint& xi, const lattice::LatticePoint& zeta,
               const Rational& aspect_sq, double delta);

// Lambda_zeta window condition: no point of annulus_points(lambda, L) lies
// in S_zeta. (Points off the annulus satisfy the norm condition vacuously,
// so this equals the quantifier over all of S_zeta.) The Lambda' gate is the
// caller's responsibility.
bool in_lambda_zeta(double lambda, const lattice::LatticePoint& zeta, const TorusGeometry& geom,
                    const FilterParams& p);

// Nonzero zeta with |zeta| <= radius, one representative per +-zeta pair
// (S_zeta = S_{-zeta}).
std::vector<lattice::LatticePoint> zeta_range(double lambda, const TorusGeometry& geom,
                                              const FilterParams& p);

// Lambda_infinity: lambda in Lambda' and in Lambda_zeta for every nonzero
// |zeta| <= lambda^epsilon. skip_prime_gate drops the Lambda' requirement
// (the window mechanism itself never uses it).
bool in_lambda_infinity(double lambda, const TorusGeometry& geom, const lattice::NormTable& table,
                        const FilterParams& p, bool skip_prime_gate = false);

// Exhaustive check that the spectral window and its zeta-shift are disjoint:
// every annulus point xi has |norm(xi + zeta) - lambda| > L. Requires
// lambda in Lambda_zeta and |zeta|^2 <= lambda^delta (rejected otherwise).
// A false return is a counterexample, not a valid outcome.
bool window_disjointness(double lambda, const lattice::LatticePoint& zeta,
                         const TorusGeometry& geom, const FilterParams& p);

// Gap midpoints of the tabulated spectrum, the canonical weakly
// interlacing base set.
std::vector<double> gap_midpoints(const lattice::NormTable& table, double lo, double hi);

struct DensityRow {
    double block_lo = 0.0;
    double block_hi = 0.0;
    std::int64_t count_base = 0;
    std::int64_t count_l1 = 0;
    std::int64_t count_l2 = 0;
    std::int64_t count_lprime = 0;
    std::int64_t count_linf = 0;
};

struct DensityOptions {
    double block_start = 1e3;  // dyadic blocks from here; [0, block_start) first
    int interlace_C = 2;
    unsigned threads = 1;
};

// Filter membership counts among Lambda0 (explicit sorted list) per dyadic
// block. Rejects bases that fail weak interlacing with the spectrum.
std::vector<DensityRow> density_report(const std::vector<double>& lambda0, double X,
                                       const TorusGeometry& geom,
                                       const lattice::NormTable& table, const FilterParams& p,
                                       const DensityOptions& opt = {});

std::string to_csv(const std::vector<DensityRow>& rows);

}  // namespace scatterlab::sieve

#endif

#ifndef SCATTERLAB_GREENS_HPP
#define SCATTERLAB_GREENS_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "scatterlab/geometry.hpp"
#include "scatterlab/lattice.hpp"

namespace scatterlab::greens {

// Value of an absolutely convergent lattice sum together with the reported
// bound on the truncated tail (before any analytic mean-density correction).
struct SummedValue {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
};

struct DeficiencyConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double cutoff_used = 0.0;
    double tail_bound = 0.0;
    // residuals of Im G_i(0) = -4pi^2 c1 and Im G_i(x0) = -4pi^2 c2 against
    // the independently aggregated shell route
    double identity_rel_err_c1 = 0.0;
    double identity_rel_err_c2 = 0.0;
};

// Per-shell data for one geometry up to `cutoff`:
//   r2[i]     = number of lattice points on shell norm[i]
//   cos_x0[i] = sum over the shell of cos(<xi, x0>)
// Enough to evaluate every sum whose displacement is 0 or +-x0.
struct ShellTable {
    Rational aspect_sq{1, 1};
    double cutoff = 0.0;
    std::vector<double> norm;
    std::vector<double> r2;
    std::vector<double> cos_x0;

    static ShellTable build(const TorusGeometry& geom, double cutoff);
    // Distance from lambda to the nearest shell (infinity for empty tables).
    double spectrum_distance(double lambda) const;
};

enum class Displacement { Zero, X0 };  // (G at x_j - x_k needs only these two)

// Fast evaluator for resolvent differences (G_mu - G_lambda)(w) at
// w in {0, +-x0}: shells below split_norm are summed directly and the block
// (split_norm, cutoff] is folded into inverse-norm moments, an exact
// regrouping of the direct sum that converges like (|lambda|/split_norm)^p.
// Valid for spectral parameters with |lambda|, |mu| <= split_norm / 4.
struct SecularSums {
    TorusGeometry geom;
    double cutoff = 0.0;      // R
    double split_norm = 0.0;  // R0
    static constexpr int kMoments = 36;

    std::vector<double> norm;    // shells <= split_norm
    std::vector<double> r2;
    std::vector<double> cos_x0;
    std::array<std::vector<double>, 2> moments;  // [Displacement][p]

    static SecularSums build(const TorusGeometry& geom, double cutoff, double split_norm = 1e4);

    // (G_mu - G_lambda)(w), with the diagonal (w = 0) mean-density tail
    // correction applied beyond the cutoff.
    SummedValue eval(cplx lambda, cplx mu, Displacement w) const;

    double spectrum_distance(double lambda) const;
    // Consecutive distinct norms bracketing lambda (both must exist).
    std::pair<double, double> gap_around(double lambda) const;
};

// Reference implementation: plain summation over lattice points with
// norm <= R, arbitrary displacement w. Computes
//   (G_mu - G_lambda)(w) = (1/4pi^2) sum_xi e^{i<xi,w>} (lambda-mu) /
//                          ((|xi|^2-mu)(|xi|^2-lambda)),
// plus, for w = 0, the mean-density analytic tail correction
// (1/4pi) log((R-mu)/(R-lambda)). lambda == mu returns exactly 0.
SummedValue resolvent_diff(const TorusGeometry& geom, cplx lambda, cplx mu,
                           const Eigen::Vector2d& w, double R);

struct DeficiencyOptions {
    bool allow_coincident = false;  // summation-routine testing only
    double identity_rel_tol = 1e-5;
};

// c1 = (1/16pi^4) sum 1/(n^2+1), c2 = (1/16pi^4) sum cos(<xi,x0>)/(n^2+1),
// with the diagonal tail correction on c1. Cross-checks the identities
// Im G_i(0) = -4pi^2 c1 and Im G_i(x0) = -4pi^2 c2 against an independently
// aggregated shell pass and throws if they disagree beyond tolerance.
DeficiencyConstants deficiency_constants(const TorusGeometry& geom, double R,
                                         const DeficiencyOptions& opt = {});

// Whitening matrix: rows (1/sqrt(c1), 0) and
// (-c2/sqrt(c1(c1^2-c2^2)), sqrt(c1/(c1^2-c2^2))). T Gram T^T = I.
Eigen::Matrix2d mixing_matrix(const DeficiencyConstants& c);

inline Eigen::Matrix2d gram_matrix(const DeficiencyConstants& c) {
    Eigen::Matrix2d g;
    g << c.c1, c.c2, c.c2, c.c1;
    return g;
}

// ||G_lambda||^2 = (1/16pi^4) sum |d1 e^{i<xi,x1>} + d2 e^{i<xi,x2>}|^2 /
// (n - lambda)^2 for |d| = 1, summed to R (<= table cutoff) with the diagonal
// tail correction.
SummedValue norm_sq(double lambda, const Eigen::Vector2cd& d, const ShellTable& table, double R);

// Same sum as a real symmetric quadratic form: ||G_lambda||^2 = d^* H d.
// Lets callers minimize over coefficient pairs exactly.
Eigen::Matrix2d norm_sq_matrix(double lambda, const ShellTable& table, double R);

// Convenience overload building a throwaway table at cutoff R.
SummedValue norm_sq(double lambda, const Eigen::Vector2cd& d, const TorusGeometry& geom, double R);

}  // namespace scatterlab::greens

#endif

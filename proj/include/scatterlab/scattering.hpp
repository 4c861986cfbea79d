#ifndef SCATTERLAB_SCATTERING_HPP
#define SCATTERLAB_SCATTERING_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "scatterlab/greens.hpp"

namespace scatterlab::scattering {

// A self-adjoint extension parameter U in U(2) with its derived data.
// rank_defect = rank(I + U) in {0, 1, 2}; U = -I (rank 0) is the standard
// Laplacian. For rank 1 extensions v0 spans ker(I + U^*).
struct ExtensionU {
    Eigen::Matrix2cd U;
    int rank_defect = 0;
    std::optional<Eigen::Vector2cd> v0;
};

// Validate unitarity (1e-12) and derive rank data (singular-value
// tolerance 1e-8).
ExtensionU extension_from_matrix(const Eigen::Matrix2cd& U);

// U(2) chart: U = e^{i phase} * SU(2)(theta, psi1, psi2).
ExtensionU make_unitary(double phase, const std::array<double, 3>& su2);

// Named presets used by the CLI and the experiments.
ExtensionU minus_identity();
ExtensionU rank1_sample();  // diag(-1, i)
ExtensionU rank2_sample();
ExtensionU preset_extension(const std::string& name);

// Extension commuting with the scatterer-swap symmetry: U has eigenvalues
// e^{i phi_plus}, e^{i phi_minus} on the (orthogonal) images of (1,1) and
// (1,-1) under the whitening matrix T. With x0 = (pi,pi) its secular problem
// factorizes into parity classes.
ExtensionU swap_symmetric_extension(const greens::DeficiencyConstants& c, double phi_plus,
                                    double phi_minus);

using UFunc = std::function<Eigen::Matrix2cd(double)>;
inline UFunc fixed_extension(const ExtensionU& e) {
    Eigen::Matrix2cd u = e.U;
    return [u](double) { return u; };
}

struct SecularMatrix {
    double lambda = 0.0;
    Eigen::Matrix2cd M;  // M[j][k] = conj((A_lambda(x_j))_k)
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

// Assemble M from resolvent differences at displacements 0 and +-x0.
// Requires lambda inside an open Laplace gap with margin
// >= margin_frac * gap width (near_singularity_error otherwise; the bottom
// gap (-inf, 0) only checks the upper margin).
SecularMatrix secular_matrix(double lambda, const greens::SecularSums& sums,
                             const Eigen::Matrix2cd& U, const Eigen::Matrix2d& T,
                             double margin_frac = 1e-6);

struct NewEigenpair {
    double lambda = 0.0;
    Eigen::Vector2cd v;  // kernel vector of M, unit norm
    Eigen::Vector2cd d;  // T^*(I+U^*) v, unit norm
    double residual = 0.0;
};

struct SolverOptions {
    double tol = 1e-8;         // acceptance: sigma_min <= tol * sigma_max
    int grid = 64;             // initial scan points per gap
    double margin_frac = 1e-6;
    bool phase_tracking = false;  // optional fast path (self-policing)
    double phase_tracking_unitarity_tol = 1e-6;
};

// All secular roots in the open gap (gap_lo, gap_hi): sigma_min scan on an
// adaptive grid, golden-section refinement, endpoint rescans of
// sigma_min * (lambda - lo)(hi - lambda) against near-pole roots.
std::vector<NewEigenpair> find_new_eigenvalues(double gap_lo, double gap_hi,
                                               const greens::SecularSums& sums,
                                               const Eigen::Matrix2d& T, const UFunc& U,
                                               const SolverOptions& opt = {});

struct SpectrumRecord {
    double lambda = 0.0;
    bool is_new = false;
    int multiplicity = 1;
    Eigen::Vector2cd d = Eigen::Vector2cd::Zero();
    double residual = 0.0;
};

struct SpectrumReport {
    std::vector<SpectrumRecord> records;  // ordered by lambda
    int max_new_in_gap = 0;
    int max_abs_deficit = 0;      // max over X <= lambda_max of |N_U - N_Delta|
    int bottom_gap_roots = 0;     // eigenvalues below the Laplace spectrum
    bool multiplicity_floored = false;
    double lambda_max = 0.0;
};

struct ScanOptions {
    SolverOptions solver;
    double bottom_floor = -1e3;  // lower end of the (-inf, 0) gap scan
    unsigned threads = 1;
};

// Per-gap new eigenvalues plus old-eigenvalue multiplicities and the
// running counting-function deficit.
SpectrumReport spectrum_scan(double lambda_max, const greens::SecularSums& sums,
                             const greens::DeficiencyConstants& c, const Eigen::Matrix2d& T,
                             const UFunc& U, const ScanOptions& opt = {});

// JSON-lines serialization, one record per eigenvalue.
std::string to_jsonl(const SpectrumReport& report);

// Unitary characteristic matrix K(lambda) = U^* B(lambda) conj(B(lambda))^{-1}
// (B = T * resolvent-difference matrix); new eigenvalues are eigenphase
// crossings of -1. Exposed for the fast path and its unitarity monitor.
Eigen::Matrix2cd characteristic_matrix(double lambda, const greens::SecularSums& sums,
                                       const Eigen::Matrix2cd& U, const Eigen::Matrix2d& T);

}  // namespace scatterlab::scattering

#endif

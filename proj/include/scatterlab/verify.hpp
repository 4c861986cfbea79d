#ifndef SCATTERLAB_VERIFY_HPP
#define SCATTERLAB_VERIFY_HPP

#include <Eigen/Dense>
#include <span>

#include "scatterlab/greens.hpp"
#include "scatterlab/scattering.hpp"

namespace scatterlab::verify {

struct InterlaceReport {
    bool disjoint = true;
    int max_run_A_between_B = 0;  // most elements of A strictly between consecutive B
    int max_run_B_between_A = 0;
    std::pair<double, double> witness_interval_A{0.0, 0.0};  // B-interval holding the A-run
    std::pair<double, double> witness_interval_B{0.0, 0.0};
    double collision = 0.0;  // a shared value when !disjoint

    bool pass(int C) const {
        return disjoint && max_run_A_between_B <= C && max_run_B_between_A <= C;
    }
};

// Merge-scan of two sorted sets. Throws on unsorted input.
InterlaceReport weak_interlacing(std::span<const double> A, std::span<const double> B);

struct ShellRank {
    int d = 0;     // shell size (Laplace multiplicity)
    int rank = 0;  // numerical rank of the 2 x d evaluation matrix
    double cond = 0.0;
    bool ill_conditioned = false;  // cond > 1e6: reported, not classified
};

// Rank of the matrix with rows (e^{i<xi,x1>})_xi and (e^{i<xi,x2>})_xi over
// the shell with the given exact key. Singular-value tolerance 1e-8 relative.
ShellRank shell_evaluation_rank(std::int64_t key, const TorusGeometry& geom);

struct OldMultiplicity {
    int multiplicity = 0;
    bool floored = false;  // d - rank came out negative and was clamped
    int rank_used = 0;
};

// Dimension of the -Delta_U eigenspace at the old eigenvalue with this key:
//   rank_defect 0 -> d
//   rank_defect 2 -> d - rank(evaluation matrix)
//   rank_defect 1 -> (d+1) - rank of the augmented matrix whose extra column
//                    is the value pair of h = <T^* v0, Im G_i> at (x1, x2),
//                    i.e. -4pi^2 * Gram * (T^T v0).
OldMultiplicity old_multiplicity(std::int64_t key, const TorusGeometry& geom,
                                 const scattering::ExtensionU& ext,
                                 const greens::DeficiencyConstants& c, const Eigen::Matrix2d& T);

struct NondegeneracyReport {
    bool pass = false;
    int shells_checked = 0;
    int shells_with_mass = 0;
    std::vector<std::int64_t> vanishing_keys;  // degenerate pattern, if any
};

// Witness that h = <T^* v0, Im G_i> is not a Laplace eigenfunction: its
// Fourier weights v1 e^{-i<xi,x1>} + v2 e^{-i<xi,x2>} (with (v1,v2) = T^T v0)
// carry mass on at least two distinct shells among norms <= 50.
NondegeneracyReport im_gi_nondegeneracy(const Eigen::Vector2cd& v0, const TorusGeometry& geom,
                                        const Eigen::Matrix2d& T);

}  // namespace scatterlab::verify

#endif

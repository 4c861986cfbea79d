#include "scatterlab/verify.hpp"

#include <algorithm>
#include <cmath>

namespace scatterlab::verify {

namespace {

void require_sorted(std::span<const double> v, const char* name) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1])
            throw std::invalid_argument(std::string("weak_interlacing: unsorted input ") + name);
}

// Max count of `inner` strictly between consecutive elements of `outer`.
std::pair<int, std::pair<double, double>> max_run(std::span<const double> inner,
                                                  std::span<const double> outer) {
    int best = 0;
    std::pair<double, double> witness{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < outer.size(); ++i) {
        const auto lo = std::upper_bound(inner.begin(), inner.end(), outer[i]);
        const auto hi = std::lower_bound(inner.begin(), inner.end(), outer[i + 1]);
        const int run = static_cast<int>(hi - lo);
        if (run > best) {
            best = run;
            witness = {outer[i], outer[i + 1]};
        }
    }
    return {best, witness};
}

Eigen::MatrixXcd evaluation_matrix(const std::vector<lattice::LatticePoint>& pts,
                                   const TorusGeometry& geom) {
    Eigen::MatrixXcd m(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const auto& xi = pts[j];
        m(0, static_cast<Eigen::Index>(j)) =
            std::polar(1.0, geom.dual_dot(xi.xi1, xi.xi2, geom.x1));
        m(1, static_cast<Eigen::Index>(j)) =
            std::polar(1.0, geom.dual_dot(xi.xi1, xi.xi2, geom.x2));
    }
    return m;
}

std::pair<int, double> numerical_rank(const Eigen::MatrixXcd& m) {
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return {0, 0.0};
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * sv(0)) ++rank;
    const double smin = sv(sv.size() - 1);
    return {rank, smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity()};
}

}  // namespace

InterlaceReport weak_interlacing(std::span<const double> A, std::span<const double> B) {
    require_sorted(A, "A");
    require_sorted(B, "B");
    InterlaceReport rep;
    // disjointness by merge-scan
    std::size_t i = 0, j = 0;
    while (i < A.size() && j < B.size()) {
        if (A[i] == B[j]) {
            rep.disjoint = false;
            rep.collision = A[i];
            break;
        }
        if (A[i] < B[j]) ++i;
        else ++j;
    }
    std::tie(rep.max_run_A_between_B, rep.witness_interval_A) = max_run(A, B);
    std::tie(rep.max_run_B_between_A, rep.witness_interval_B) = max_run(B, A);
    return rep;
}

ShellRank shell_evaluation_rank(std::int64_t key, const TorusGeometry& geom) {
    const auto pts = lattice::shell_points(geom.aspect_sq, key);
    if (pts.empty()) throw std::invalid_argument("shell_evaluation_rank: empty shell");
    ShellRank out;
    out.d = static_cast<int>(pts.size());
    const Eigen::MatrixXcd m = evaluation_matrix(pts, geom);
    std::tie(out.rank, out.cond) = numerical_rank(m);
    out.ill_conditioned = out.cond > 1e6;
    return out;
}

OldMultiplicity old_multiplicity(std::int64_t key, const TorusGeometry& geom,
                                 const scattering::ExtensionU& ext,
                                 const greens::DeficiencyConstants& c, const Eigen::Matrix2d& T) {
    const auto pts = lattice::shell_points(geom.aspect_sq, key);
    if (pts.empty()) throw std::invalid_argument("old_multiplicity: empty shell");
    const int d = static_cast<int>(pts.size());
    OldMultiplicity out;
    if (ext.rank_defect == 0) {
        out.multiplicity = d;
        return out;
    }
    const Eigen::MatrixXcd eval = evaluation_matrix(pts, geom);
    if (ext.rank_defect == 2) {
        std::tie(out.rank_used, std::ignore) = numerical_rank(eval);
        out.multiplicity = d - out.rank_used;
    } else {
        if (!ext.v0) throw std::invalid_argument("old_multiplicity: rank-1 extension without v0");
        const Eigen::Vector2cd tv = T.transpose() * (*ext.v0);
        const Eigen::Vector2cd h = -kFourPiSq * (greens::gram_matrix(c).cast<cplx>() * tv);
        Eigen::MatrixXcd aug(2, eval.cols() + 1);
        aug << eval, h;
        std::tie(out.rank_used, std::ignore) = numerical_rank(aug);
        out.multiplicity = (d + 1) - out.rank_used;
    }
    if (out.multiplicity < 0) {
        out.multiplicity = 0;
        out.floored = true;
    }
    return out;
}

NondegeneracyReport im_gi_nondegeneracy(const Eigen::Vector2cd& v0, const TorusGeometry& geom,
                                        const Eigen::Matrix2d& T) {
    const Eigen::Vector2cd w = T.transpose() * v0;
    const double scale = w.cwiseAbs().sum();
    const lattice::NormTable table = lattice::sieve_norms(50.0, geom.aspect_sq);
    NondegeneracyReport rep;
    for (const auto& entry : table.entries) {
        const auto pts = lattice::shell_points(geom.aspect_sq, entry.key);
        double peak = 0.0;
        for (const auto& xi : pts) {
            const cplx weight =
                w(0) * std::polar(1.0, -geom.dual_dot(xi.xi1, xi.xi2, geom.x1)) +
                w(1) * std::polar(1.0, -geom.dual_dot(xi.xi1, xi.xi2, geom.x2));
            peak = std::max(peak, std::abs(weight));
        }
        ++rep.shells_checked;
        if (peak > 1e-12 * scale) ++rep.shells_with_mass;
        else rep.vanishing_keys.push_back(entry.key);
    }
    rep.pass = rep.shells_with_mass >= 2;
    return rep;
}

}  // namespace scatterlab::verify

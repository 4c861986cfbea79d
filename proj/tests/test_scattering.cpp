#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scatterlab/scattering.hpp"

using namespace scatterlab;
using namespace scatterlab::scattering;

namespace {

struct Setup {
    TorusGeometry geom = default_geometry();
    greens::DeficiencyConstants c;
    Eigen::Matrix2d T;
    greens::SecularSums sums;

    Setup() : c(greens::deficiency_constants(geom, 1e5)),
              T(greens::mixing_matrix(c)),
              sums(greens::SecularSums::build(geom, 1e6, 1e4)) {}
};

const Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

TEST_CASE("make_unitary chart and rank defects") {
    const auto minus_i = minus_identity();
    CHECK(minus_i.U.isApprox(-Eigen::Matrix2cd::Identity(), 1e-14));
    CHECK(minus_i.rank_defect == 0);

    const auto identity = make_unitary(0.0, {0.0, 0.0, 0.0});
    CHECK(identity.rank_defect == 2);

    const auto r1 = rank1_sample();  // diag(-1, i)
    CHECK(std::abs(r1.U(0, 0) - cplx(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(r1.U(1, 1) - cplx(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(r1.U(0, 1)) < 1e-15);
    CHECK(r1.rank_defect == 1);
    REQUIRE(r1.v0.has_value());
    CHECK(std::abs((*r1.v0)(0)) == doctest::Approx(1.0));  // v0 = (1,0) up to phase

    CHECK(rank2_sample().rank_defect == 2);

    Eigen::Matrix2cd bad;
    bad << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(extension_from_matrix(bad), std::invalid_argument);
}

TEST_CASE("swap-symmetric extension commutes with the T-conjugated swap") {
    const auto& s = setup();
    const auto ext = swap_symmetric_extension(s.c, 2.0, -1.0);
    CHECK((ext.U * ext.U.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
    Eigen::Matrix2d swap;
    swap << 0.0, 1.0, 1.0, 0.0;
    const Eigen::Matrix2d k = s.T * swap * s.T.inverse();
    CHECK((ext.U * k.cast<cplx>() - k.cast<cplx>() * ext.U).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("secular matrix margin guard") {
    const auto& s = setup();
    const auto ext = rank2_sample();
    // gap (4, 5); the margin is 1e-6 of the gap width
    CHECK_THROWS_AS(secular_matrix(4.0 + 1e-9, s.sums, ext.U, s.T, 1e-6),
                    near_singularity_error);
    const auto sm = secular_matrix(4.5, s.sums, ext.U, s.T, 1e-6);
    CHECK(sm.sigma_min >= 0.0);
    CHECK(sm.sigma_max >= sm.sigma_min);
    CHECK(sm.M.allFinite());
}

TEST_CASE("minus identity has no new eigenvalues") {
    const auto& s = setup();
    const auto ext = minus_identity();
    for (auto [lo, hi] : std::vector<std::pair<double, double>>{{4, 5}, {8, 9}, {-100, 0}}) {
        const auto roots = find_new_eigenvalues(lo, hi, s.sums, s.T, fixed_extension(ext));
        CHECK(roots.empty());
    }
}

TEST_CASE("rank-2 sample: roots validate and are locally minimal") {
    const auto& s = setup();
    const auto ext = rank2_sample();
    const UFunc u = fixed_extension(ext);
    std::size_t total = 0;
    for (auto [lo, hi] : std::vector<std::pair<double, double>>{{4, 5}, {5, 8}, {9, 10}}) {
        const auto roots = find_new_eigenvalues(lo, hi, s.sums, s.T, u);
        CHECK(roots.size() <= 2);
        for (const auto& r : roots) {
            ++total;
            CHECK(r.lambda > lo);
            CHECK(r.lambda < hi);
            const auto sm = secular_matrix(r.lambda, s.sums, ext.U, s.T, 0.0);
            CHECK(sm.sigma_min <= 1e-8 * sm.sigma_max);
            // local minimality of sigma_min
            const double probe = 1e-7 * (hi - lo);
            CHECK(secular_matrix(r.lambda + probe, s.sums, ext.U, s.T, 0.0).sigma_min >
                  sm.sigma_min);
            CHECK(secular_matrix(r.lambda - probe, s.sums, ext.U, s.T, 0.0).sigma_min >
                  sm.sigma_min);
            CHECK(std::abs(r.d.norm() - 1.0) < 1e-12);
            // v stays clear of ker(I + U^*)
            CHECK(((Eigen::Matrix2cd::Identity() + ext.U.adjoint()) * r.v).norm() > 1e-10);
        }
    }
    CHECK(total > 0);
}

TEST_CASE("sigma_min is positive and continuous across a gap") {
    const auto& s = setup();
    const auto ext = rank2_sample();
    // dense scan midway through (5, 8): no discontinuities, no exact zeros
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 5.2 + 2.6 * i / 200.0;
        const double v = secular_matrix(x, s.sums, ext.U, s.T, 0.0).sigma_min;
        CHECK(v > 0.0);
        if (prev >= 0.0) CHECK(std::abs(v - prev) < 0.35 * std::max(1.0, prev));
        prev = v;
    }
}

TEST_CASE("continuity under a 1e-10 extension perturbation") {
    const auto& s = setup();
    const auto ext = rank2_sample();
    const Eigen::Matrix2cd u2 = std::polar(1.0, 1e-10) * ext.U;
    const auto base = find_new_eigenvalues(5.0, 8.0, s.sums, s.T, fixed_extension(ext));
    const auto moved =
        find_new_eigenvalues(5.0, 8.0, s.sums, s.T, [&](double) { return u2; });
    REQUIRE(base.size() == moved.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(base[i].lambda - moved[i].lambda) < 1e-6);
}

TEST_CASE("phase tracking agrees with the sigma_min baseline") {
    const auto& s = setup();
    const auto ext = rank2_sample();
    const Eigen::Matrix2cd k = characteristic_matrix(6.1, s.sums, ext.U, s.T);
    CHECK((k * k.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-6);

    SolverOptions fast;
    fast.phase_tracking = true;
    const auto a = find_new_eigenvalues(5.0, 8.0, s.sums, s.T, fixed_extension(ext));
    const auto b = find_new_eigenvalues(5.0, 8.0, s.sums, s.T, fixed_extension(ext), fast);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i].lambda - b[i].lambda) < 1e-9);
}

TEST_CASE("spectrum scan: counting, deficits, jsonl shape") {
    const auto& s = setup();
    ScanOptions opt;
    opt.threads = 2;

    const auto quiet = spectrum_scan(60.0, s.sums, s.c, s.T,
                                     fixed_extension(minus_identity()), opt);
    CHECK(quiet.max_abs_deficit == 0);
    for (const auto& rec : quiet.records) CHECK_FALSE(rec.is_new);

    const auto rep = spectrum_scan(60.0, s.sums, s.c, s.T,
                                   fixed_extension(rank2_sample()), opt);
    CHECK(rep.max_new_in_gap <= 2);
    CHECK(rep.max_abs_deficit <= 2);
    CHECK(rep.bottom_gap_roots >= 1);
    for (std::size_t i = 1; i < rep.records.size(); ++i)
        CHECK(rep.records[i].lambda >= rep.records[i - 1].lambda);

    const std::string jsonl = to_jsonl(rep);
    CHECK(jsonl.find("\"kind\": \"new\"") != std::string::npos);
    CHECK(jsonl.find("\"kind\": \"old\"") != std::string::npos);

    // lambda-dependent extensions are probed pointwise
    const auto varying = spectrum_scan(
        20.0, s.sums, s.c, s.T,
        [&](double lam) {
            return (std::polar(1.0, 1e-3 * lam) * rank2_sample().U).eval();
        },
        opt);
    CHECK(varying.max_abs_deficit <= 2);
}

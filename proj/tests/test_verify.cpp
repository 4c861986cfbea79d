#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scatterlab/verify.hpp"

using namespace scatterlab;
using namespace scatterlab::verify;

namespace {

struct Setup {
    TorusGeometry geom = default_geometry();
    greens::DeficiencyConstants c;
    Eigen::Matrix2d T;

    Setup() : c(greens::deficiency_constants(geom, 1e4)), T(greens::mixing_matrix(c)) {}
};

const Setup& setup() {
    static Setup s;
    return s;
}

}  // namespace

TEST_CASE("weak interlacing") {
    const std::vector<double> a{1, 3, 5}, b{2, 4, 6};
    CHECK(weak_interlacing(a, b).pass(1));

    const std::vector<double> c{1, 2}, d{2, 3};
    CHECK_FALSE(weak_interlacing(c, d).pass(5));  // not disjoint
    CHECK(weak_interlacing(c, d).collision == 2.0);

    const std::vector<double> e{1, 10}, f{2, 3, 4};
    const auto rep = weak_interlacing(e, f);
    CHECK(rep.max_run_B_between_A == 3);
    CHECK_FALSE(rep.pass(2));
    CHECK(rep.pass(3));

    const std::vector<double> unsorted{3, 1};
    CHECK_THROWS_AS(weak_interlacing(unsorted, f), std::invalid_argument);
}

TEST_CASE("shell evaluation rank") {
    const auto& s = setup();
    const auto r1 = shell_evaluation_rank(1, s.geom);
    CHECK(r1.d == 4);
    CHECK(r1.rank == 2);

    // identical rows when the scatterers coincide (guard bypassed on purpose)
    TorusGeometry degenerate = s.geom;
    degenerate.x2 = degenerate.x1;
    degenerate.x0 = {0.0, 0.0};
    CHECK(shell_evaluation_rank(1, degenerate).rank == 1);

    // half-period x0: the second row is +-(first row), rank 1
    const auto half = make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi, kPi});
    CHECK(shell_evaluation_rank(1, half).rank == 1);
    CHECK(shell_evaluation_rank(2, half).rank == 1);

    CHECK_THROWS_AS(shell_evaluation_rank(3, s.geom), std::invalid_argument);

    // invariance under common translation of both scatterers
    for (std::int64_t n : {5, 25, 50}) {
        const auto base = shell_evaluation_rank(n, s.geom);
        const auto moved = make_geometry(
            s.geom.aspect_sq, s.geom.x1 + Eigen::Vector2d(0.37, 1.41),
            s.geom.x2 + Eigen::Vector2d(0.37, 1.41));
        CHECK(shell_evaluation_rank(n, moved).rank == base.rank);
        CHECK(shell_evaluation_rank(n, moved).d == base.d);
    }
}

TEST_CASE("old multiplicity per rank defect") {
    const auto& s = setup();
    const auto minus_i = scattering::minus_identity();
    const auto r1 = scattering::rank1_sample();
    const auto r2 = scattering::rank2_sample();
    // n = 1: d = 4
    CHECK(old_multiplicity(1, s.geom, minus_i, s.c, s.T).multiplicity == 4);
    CHECK(old_multiplicity(1, s.geom, r1, s.c, s.T).multiplicity == 3);
    CHECK(old_multiplicity(1, s.geom, r2, s.c, s.T).multiplicity == 2);
    // n = 5: d = 8
    CHECK(old_multiplicity(5, s.geom, minus_i, s.c, s.T).multiplicity == 8);
    CHECK(old_multiplicity(5, s.geom, r1, s.c, s.T).multiplicity == 7);
    CHECK(old_multiplicity(5, s.geom, r2, s.c, s.T).multiplicity == 6);
    // zero shell: d = 1, evaluation rank 1
    CHECK(old_multiplicity(0, s.geom, minus_i, s.c, s.T).multiplicity == 1);
    CHECK(old_multiplicity(0, s.geom, r2, s.c, s.T).multiplicity == 0);
}

TEST_CASE("im G_i nondegeneracy") {
    const auto& s = setup();
    CHECK(im_gi_nondegeneracy(Eigen::Vector2cd(1.0, 0.0), s.geom, s.T).pass);

    // generic weights v1 + v2 e^{-i<xi,x0>} cannot vanish on shells 1 and 2
    const Eigen::Vector2cd mixed =
        s.T.transpose().inverse().cast<cplx>() * Eigen::Vector2cd(1.0, 1.0);
    const auto rep = im_gi_nondegeneracy(mixed, s.geom, s.T);
    CHECK(rep.pass);
    CHECK(rep.vanishing_keys.empty());

    // half-period point with weights (1,1): odd-parity shells vanish, the
    // witness still finds mass on even shells
    const auto half = make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi, kPi});
    const auto c_half = greens::deficiency_constants(half, 1e4);
    const Eigen::Matrix2d t_half = greens::mixing_matrix(c_half);
    const Eigen::Vector2cd v0 =
        t_half.transpose().inverse().cast<cplx>() * Eigen::Vector2cd(1.0, 1.0);
    const auto degenerate = im_gi_nondegeneracy(v0, half, t_half);
    CHECK(degenerate.pass);
    CHECK_FALSE(degenerate.vanishing_keys.empty());
    for (const auto key : degenerate.vanishing_keys) CHECK(key % 2 == 1);
}

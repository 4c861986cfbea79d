#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scatterlab/greens.hpp"

using namespace scatterlab;
using namespace scatterlab::greens;

namespace {
const cplx kI{0.0, 1.0};
}

TEST_CASE("resolvent_diff basics") {
    const auto geom = default_geometry();
    CHECK(resolvent_diff(geom, 0.5, 0.5, {0.0, 0.0}, 1e4).value == cplx{0.0, 0.0});

    // real spectral parameters: imaginary part only from summation noise,
    // well below the reported tail bound; even in w
    const auto a = resolvent_diff(geom, 0.5, 3.3, geom.x0, 1e4);
    const auto b = resolvent_diff(geom, 0.5, 3.3, -geom.x0, 1e4);
    CHECK(std::abs(a.value.imag()) < 1e-10);
    CHECK(std::abs(a.value.imag()) < a.tail_bound);
    CHECK(a.value.real() == doctest::Approx(b.value.real()).epsilon(1e-13));

    // conjugation identity G_{-i} = conj(G_i)
    const auto ci = resolvent_diff(geom, 0.5, kI, geom.x0, 1e4);
    const auto cmi = resolvent_diff(geom, 0.5, -kI, geom.x0, 1e4);
    CHECK(std::abs(std::conj(ci.value) - cmi.value) < 1e-12);

    CHECK_THROWS_AS(resolvent_diff(geom, 5.0, kI, {0.0, 0.0}, 1e4), singular_input_error);
    CHECK_THROWS_AS(resolvent_diff(geom, 0.5, kI, {0.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("two-cutoff consistency of the direct summer") {
    const auto geom = default_geometry();
    for (const Eigen::Vector2d& w :
         {Eigen::Vector2d{0.0, 0.0}, Eigen::Vector2d{geom.x0[0], geom.x0[1]},
          Eigen::Vector2d{0.83, 2.11}}) {
        const auto lo = resolvent_diff(geom, 0.5, kI, w, 2e4);
        const auto hi = resolvent_diff(geom, 0.5, kI, w, 8e4);
        CHECK(std::abs(lo.value - hi.value) < lo.tail_bound);
    }
}

TEST_CASE("moment-tail evaluator with a pair of real spectral parameters") {
    const auto geom = default_geometry();
    const auto sums = greens::SecularSums::build(geom, 4e4, 1e4);
    const auto fast = sums.eval(7.3, 11.5, Displacement::X0);
    const auto direct = resolvent_diff(geom, 7.3, 11.5, geom.x0, 4e4);
    CHECK(std::abs(fast.value - direct.value) < 1e-10 * std::max(1.0, std::abs(direct.value)));
}

TEST_CASE("moment-tail evaluator matches the direct summer exactly") {
    const auto geom = default_geometry();
    const auto sums = SecularSums::build(geom, 4e4, 1e4);
    for (double lambda : {0.5, 7.3, 101.3, 499.5}) {
        for (auto w : {Displacement::Zero, Displacement::X0}) {
            const Eigen::Vector2d wv =
                w == Displacement::Zero ? Eigen::Vector2d::Zero().eval() : geom.x0;
            const auto fast = sums.eval(lambda, kI, w);
            const auto direct = resolvent_diff(geom, lambda, kI, wv, 4e4);
            CHECK(std::abs(fast.value - direct.value) <
                  1e-10 * std::max(1.0, std::abs(direct.value)));
        }
    }
    CHECK_THROWS_AS(sums.eval(5e3, kI, Displacement::Zero), std::invalid_argument);
}

TEST_CASE("deficiency constants") {
    const auto geom = default_geometry();
    const auto lo = deficiency_constants(geom, 1e4);
    const auto hi = deficiency_constants(geom, 4e4);
    CHECK(std::abs(lo.c1 - hi.c1) / hi.c1 < 1e-6);
    CHECK(std::abs(lo.c2 - hi.c2) / std::abs(hi.c2) < 1e-5);
    CHECK(lo.c1 > std::abs(lo.c2));
    CHECK(lo.identity_rel_err_c1 < 1e-9);
    CHECK(lo.identity_rel_err_c2 < 1e-9);

    // 16 pi^4 c1 = sum r2(n)/(n^2+1): bounded below by the hand-computed
    // partial 1 + 4/2 + 4/5 + 4/17 + 8/26 and above by that plus the
    // mean-density tail pi (pi/2 - atan 7)
    const double partial = 1.0 + 2.0 + 0.8 + 4.0 / 17.0 + 8.0 / 26.0;
    CHECK(hi.c1 * kSixteenPiFourth > partial);
    CHECK(hi.c1 * kSixteenPiFourth < partial + kPi * (kPi / 2.0 - std::atan(7.0)) + 0.1);

    CHECK_THROWS_AS(deficiency_constants(geom, 1e3), std::invalid_argument);
}

TEST_CASE("coincident scatterers: guard and c2 = c1 with the guard off") {
    TorusGeometry g = default_geometry();
    g.x2 = g.x1;
    g.x0 = {0.0, 0.0};
    CHECK_THROWS_AS(deficiency_constants(g, 1e4), std::invalid_argument);
    DeficiencyOptions opt;
    opt.allow_coincident = true;
    const auto c = deficiency_constants(g, 1e4, opt);
    CHECK(std::abs(c.c1 - c.c2) < 2.0 * c.tail_bound + 1e-12);
}

TEST_CASE("mixing matrix") {
    DeficiencyConstants c;
    c.c1 = 1.0;
    c.c2 = 0.0;
    CHECK(mixing_matrix(c).isApprox(Eigen::Matrix2d::Identity(), 1e-15));

    c.c1 = 2.0;
    c.c2 = 1.0;
    const Eigen::Matrix2d t = mixing_matrix(c);
    CHECK(t(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(t(0, 1) == 0.0);
    CHECK(t(1, 0) == doctest::Approx(-1.0 / std::sqrt(6.0)));
    CHECK(t(1, 1) == doctest::Approx(2.0 / std::sqrt(6.0)));
    CHECK((t * gram_matrix(c) * t.transpose() - Eigen::Matrix2d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(t.determinant() == doctest::Approx(1.0 / std::sqrt(3.0)));

    c.c2 = 2.5;
    CHECK_THROWS_AS(mixing_matrix(c), degenerate_gram_error);

    // computed constants satisfy the whitening property tightly
    const auto real_c = deficiency_constants(default_geometry(), 1e4);
    const Eigen::Matrix2d tw = mixing_matrix(real_c);
    CHECK((tw * gram_matrix(real_c) * tw.transpose() - Eigen::Matrix2d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("norm_sq") {
    const auto geom = default_geometry();
    const auto table = ShellTable::build(geom, 4.5e4);

    // d = (1,0): cross term absent, reduces to the multiplicity sum
    const double lambda = 0.5;
    const auto v = norm_sq(lambda, Eigen::Vector2cd(1.0, 0.0), table, 1.05e4);
    double plain = 0.0;
    for (std::size_t i = 0; i < table.norm.size(); ++i) {
        if (table.norm[i] > 1.05e4) break;
        plain += table.r2[i] / ((table.norm[i] - lambda) * (table.norm[i] - lambda));
    }
    plain += kPi / (1.05e4 - lambda);
    CHECK(v.value.real() == doctest::Approx(plain / kSixteenPiFourth).epsilon(1e-14));

    // two-cutoff consistency
    const auto v4 = norm_sq(lambda, Eigen::Vector2cd(1.0, 0.0), table, 4.2e4);
    CHECK(std::abs(v.value.real() - v4.value.real()) / v4.value.real() < 1e-6);

    // global phase invariance
    const Eigen::Vector2cd d(0.6, cplx(0.48, 0.64));
    const cplx phase = std::polar(1.0, 1.234);
    const auto a = norm_sq(lambda, d, table, 1.05e4);
    const auto b = norm_sq(lambda, (phase * d).eval(), table, 1.05e4);
    CHECK(a.value.real() == doctest::Approx(b.value.real()).epsilon(1e-13));

    CHECK_THROWS_AS(norm_sq(5.0, Eigen::Vector2cd(1.0, 0.0), table, 1.05e4),
                    singular_input_error);
    CHECK_THROWS_AS(norm_sq(0.5, Eigen::Vector2cd(1.0, 1.0), table, 1.05e4),
                    std::invalid_argument);
}

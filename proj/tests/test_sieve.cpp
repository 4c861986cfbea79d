#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scatterlab/sieve.hpp"

using namespace scatterlab;
using namespace scatterlab::sieve;
using lattice::LatticePoint;

namespace {

const TorusGeometry& geom() {
    static TorusGeometry g = default_geometry();
    return g;
}
const lattice::NormTable& table() {
    static auto t = lattice::sieve_norms(5e3, Rational{1, 1});
    return t;
}

}  // namespace

TEST_CASE("estimate_type") {
    const auto rat = estimate_type({0.5, 1.0 / 3.0}, 1e3);
    CHECK(rat.rational_flag);
    CHECK(rat.rational_q == 6);

    const auto dio = estimate_type({std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0}, 100000);
    CHECK_FALSE(dio.rational_flag);
    CHECK(dio.kappa_hat >= 1.5);
    CHECK(dio.kappa_hat <= 2.2);
    CHECK_FALSE(dio.records.empty());
    // records are the running minima of max_j ||q alpha_j||
    for (std::size_t i = 1; i < dio.records.size(); ++i) {
        CHECK(dio.records[i].m < dio.records[i - 1].m);
        CHECK(dio.records[i].q > dio.records[i - 1].q);
    }

    // one rational coordinate: component minima vanish but the max stays up
    const auto half = estimate_type({0.5, std::sqrt(2.0)}, 2000);
    CHECK_FALSE(half.rational_flag);
    CHECK(half.kappa_hat >= 1.5);

    CHECK_THROWS_AS(estimate_type({0.1, 0.2}, 10), std::invalid_argument);
}

TEST_CASE("filter_lambda1") {
    FilterParams p;
    CHECK(filter_lambda1(5.001, table(), p));      // tiny gap above a norm
    CHECK_FALSE(filter_lambda1(7.3, table(), p));  // 7.3 - 5 = 2.3 > 7.3^0.05
    CHECK(filter_lambda1(4000.5, table(), p));     // 4000 is a norm
}

TEST_CASE("filter_lambda2") {
    FilterParams p;
    // default Diophantine x0, n_lambda = 1
    CHECK(filter_lambda2(1.5, geom(), table(), p));

    // rational half-period point kills the filter
    const auto bad = make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi, kPi});
    for (double lam : {1.5, 10.5, 100.3, 1000.2})
        CHECK_FALSE(filter_lambda2(lam, bad, table(), p));

    // alpha2 = 0: perfect-square shells put the max on a vanishing sine
    const auto degenerate =
        make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi * (std::sqrt(2.0) - 1.0), 0.0});
    CHECK_FALSE(filter_lambda2(4.3, degenerate, table(), p));  // n_lambda = 4 = 2^2

    // n_lambda = 0 cannot certify
    CHECK_FALSE(filter_lambda2(0.5, geom(), table(), p));
}

TEST_CASE("in_S_zeta") {
    const Rational sq{1, 1};
    CHECK(in_S_zeta({3, 4}, {4, -3}, sq, 0.05));   // orthogonal, any delta
    CHECK(in_S_zeta({3, 4}, {4, -3}, sq, 0.24));
    CHECK_FALSE(in_S_zeta({5, 0}, {1, 0}, sq, 0.2));  // 5 > 2*25^0.2
    CHECK(in_S_zeta({0, 0}, {1, 0}, sq, 0.2));        // both sides zero
    CHECK_THROWS_AS(in_S_zeta({1, 1}, {0, 0}, sq, 0.2), std::invalid_argument);
}

TEST_CASE("in_lambda_zeta window checks") {
    FilterParams p;
    // lambda near a square norm: (0, +-k) is orthogonal to (1, 0)
    CHECK_FALSE(in_lambda_zeta(25.3, {1, 0}, geom(), p));

    // an empty annulus is vacuously in Lambda_zeta: hunt one down
    bool found_empty = false;
    for (double mid : gap_midpoints(table(), 10.0, 5e3)) {
        if (!lattice::annulus_points(mid, p.window_half_width(mid), Rational{1, 1}).empty())
            continue;
        found_empty = true;
        CHECK(in_lambda_zeta(mid, {1, 0}, geom(), p));
        CHECK(in_lambda_zeta(mid, {1, 1}, geom(), p));
        break;
    }
    CHECK(found_empty);
}

TEST_CASE("zeta_range covers one representative per +-pair") {
    FilterParams p;
    const auto zs = zeta_range(1e4, geom(), p);  // lambda^eps ~ 1.58
    REQUIRE(zs.size() == 4);
    for (const auto& z : zs) {
        CHECK((z.xi1 > 0 || (z.xi1 == 0 && z.xi2 > 0)));
        CHECK(z.xi1 * z.xi1 + z.xi2 * z.xi2 <= 2);
    }
}

TEST_CASE("lambda_infinity is gated by lambda_prime") {
    FilterParams p;
    const auto bad = make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi, kPi});
    CHECK_FALSE(in_lambda_infinity(1234.5, bad, table(), p));
    // skip flag bypasses the gate; the window condition itself can then pass
    bool any = false;
    for (double mid : gap_midpoints(table(), 1e3, 5e3)) {
        if (in_lambda_infinity(mid, bad, table(), p, true)) {
            any = true;
            break;
        }
    }
    CHECK(any);
}

TEST_CASE("window disjointness") {
    FilterParams p;
    // vacuous on an empty annulus
    for (double mid : gap_midpoints(table(), 10.0, 5e3)) {
        if (lattice::annulus_points(mid, p.window_half_width(mid), Rational{1, 1}).empty()) {
            CHECK(window_disjointness(mid, {1, 0}, geom(), p));
            break;
        }
    }
    // exhaustive check along Lambda_zeta members
    std::size_t checked = 0;
    for (double mid : gap_midpoints(table(), 1e3, 3e3)) {
        if (!in_lambda_zeta(mid, {1, 0}, geom(), p)) continue;
        CHECK(window_disjointness(mid, {1, 0}, geom(), p));
        if (++checked == 25) break;
    }
    CHECK(checked == 25);

    // precondition violations are rejected
    CHECK_THROWS_AS(window_disjointness(25.3, {1, 0}, geom(), p), std::invalid_argument);

    // outside Lambda_zeta the shifted window really is hit (the hypothesis
    // is needed): exhibit an annulus point whose shift stays in the window
    bool witnessed = false;
    for (double mid : gap_midpoints(table(), 100.0, 3e3)) {
        if (in_lambda_zeta(mid, {1, 0}, geom(), p)) continue;
        const double L = p.window_half_width(mid);
        for (const auto& ap : lattice::annulus_points(mid, L, Rational{1, 1})) {
            const double shifted = lattice::norm_value(
                Rational{1, 1}, lattice::norm_key(Rational{1, 1}, ap.xi.xi1 + 1, ap.xi.xi2));
            if (std::abs(shifted - mid) <= L) {
                witnessed = true;
                break;
            }
        }
        if (witnessed) break;
    }
    CHECK(witnessed);
}

TEST_CASE("filter monotonicity in the dials") {
    FilterParams loose;
    loose.C1 = 4.0;
    loose.c2_low = 0.1;
    FilterParams tight;
    for (double mid : gap_midpoints(table(), 2.0, 2e3)) {
        if (filter_lambda1(mid, table(), tight)) CHECK(filter_lambda1(mid, table(), loose));
        if (filter_lambda2(mid, geom(), table(), tight))
            CHECK(filter_lambda2(mid, geom(), table(), loose));
    }
}

TEST_CASE("density report") {
    FilterParams p;
    const auto mids = gap_midpoints(table(), 0.0, 2e3);
    DensityOptions opt;
    opt.block_start = 250.0;
    opt.threads = 2;
    const auto rows = density_report(mids, 2e3, geom(), table(), p, opt);
    REQUIRE(!rows.empty());
    std::int64_t base = 0;
    for (const auto& r : rows) {
        base += r.count_base;
        CHECK(r.count_linf <= r.count_lprime);
        CHECK(r.count_lprime <= r.count_l1);
        CHECK(r.count_lprime <= r.count_l2);
        CHECK(r.count_l1 <= r.count_base);
    }
    CHECK(base == static_cast<std::int64_t>(mids.size()));

    const std::string csv = to_csv(rows);
    CHECK(csv.rfind("block_lo,block_hi,count_base,count_l1,count_l2,count_lprime,count_linf\n",
                    0) == 0);

    // half-period x0 kills Lambda2 everywhere
    const auto bad = make_geometry(Rational{1, 1}, {0.0, 0.0}, {kPi, kPi});
    for (const auto& r : density_report(mids, 2e3, bad, table(), p, opt))
        CHECK(r.count_l2 == 0);

    // non-interlacing bases are rejected
    std::vector<double> clumped{10.1, 10.2, 10.3, 10.35, 10.4};
    CHECK_THROWS_AS(density_report(clumped, 2e3, geom(), table(), p, opt),
                    std::invalid_argument);
}

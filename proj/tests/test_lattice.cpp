#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "scatterlab/lattice.hpp"

using namespace scatterlab;
using namespace scatterlab::lattice;

namespace {

// independent brute-force count of xi with xi1^2 + xi2^2 = n
std::int64_t brute_r2(std::int64_t n) {
    std::int64_t count = 0;
    const auto r = static_cast<std::int64_t>(std::ceil(std::sqrt(double(n))));
    for (std::int64_t a = -r; a <= r; ++a) {
        if (a * a > n) continue;
        const std::int64_t rem = n - a * a;
        const auto b = static_cast<std::int64_t>(std::llround(std::sqrt(double(rem))));
        for (std::int64_t s : {b - 1, b, b + 1})
            if (s >= 0 && s * s == rem) count += (s == 0) ? 1 : 2;
    }
    return count;
}

}  // namespace

TEST_CASE("sieve_norms square torus up to 20") {
    const auto t = sieve_norms(20.0, Rational{1, 1});
    std::vector<std::int64_t> keys;
    for (const auto& e : t.entries) keys.push_back(e.key);
    // brute force over all xi with xi1^2 + xi2^2 <= 20
    CHECK(keys == std::vector<std::int64_t>{0, 1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20});
    for (const auto& e : t.entries) CHECK(e.mult == brute_r2(e.key));
}

TEST_CASE("sieve_norms X = 0 keeps only the origin") {
    const auto t = sieve_norms(0.0, Rational{1, 1});
    REQUIRE(t.size() == 1);
    CHECK(t.entries[0].key == 0);
    CHECK(t.entries[0].mult == 1);
}

TEST_CASE("sieve_norms rejects bad aspect") {
    CHECK_THROWS_AS(sieve_norms(10.0, Rational::make(-2, 1)), std::invalid_argument);
}

TEST_CASE("total multiplicity equals the exact disk count at X = 1e4") {
    const auto t = sieve_norms(1e4, Rational{1, 1});
    std::int64_t total = 0;
    for (const auto& e : t.entries) total += e.mult;
    std::int64_t disk = 0;
    for (std::int64_t a = -100; a <= 100; ++a)
        for (std::int64_t b = -100; b <= 100; ++b)
            if (a * a + b * b <= 10000) ++disk;
    CHECK(total == disk);
    // Landau-type behavior, qualitative only: #norms / (X / sqrt(log X))
    const double ratio =
        static_cast<double>(t.size()) / (1e4 / std::sqrt(std::log(1e4)));
    CHECK(ratio > 0.6);
    CHECK(ratio < 1.0);
}

TEST_CASE("circle points") {
    const auto pts = circle_points(25);
    REQUIRE(pts.size() == 12);
    const std::set<std::pair<std::int64_t, std::int64_t>> want{
        {5, 0},  {-5, 0}, {0, 5},  {0, -5}, {3, 4},  {3, -4},
        {-3, 4}, {-3, -4}, {4, 3}, {4, -3}, {-4, 3}, {-4, -3}};
    for (const auto& p : pts) CHECK(want.count({p.xi1, p.xi2}) == 1);
    CHECK(std::is_sorted(pts.begin(), pts.end()));

    CHECK(circle_points(3).empty());
    REQUIRE(circle_points(0).size() == 1);
    CHECK(circle_points(0)[0] == LatticePoint{0, 0});
}

TEST_CASE("circle point counts match brute force up to 1e4") {
    const auto t = sieve_norms(1e4, Rational{1, 1});
    std::size_t i = 0;
    for (std::int64_t n = 0; n <= 10000; ++n) {
        const auto pts = circle_points(n);
        const std::int64_t want = brute_r2(n);
        CHECK(static_cast<std::int64_t>(pts.size()) == want);
        if (i < t.size() && t.entries[i].key == n) {
            CHECK(t.entries[i].mult == want);
            ++i;
        } else {
            CHECK(want == 0);
        }
    }
    CHECK(i == t.size());
}

TEST_CASE("annulus points") {
    const auto pts = annulus_points(10.0, 1.5, Rational{1, 1});
    CHECK(pts.size() == 12);  // r2(9) + r2(10) = 4 + 8
    for (const auto& p : pts) CHECK((p.key == 9 || p.key == 10));

    CHECK(annulus_points(3.0, 0.5, Rational{1, 1}).empty());
    const auto origin = annulus_points(0.0, 0.1, Rational{1, 1});
    REQUIRE(origin.size() == 1);
    CHECK(origin[0].xi == LatticePoint{0, 0});
}

TEST_CASE("annulus equals union of circles over tabulated norms") {
    for (const auto& [lambda, L] : std::vector<std::pair<double, double>>{
             {50.3, 4.0}, {101.0, 2.5}, {777.7, 9.1}}) {
        const auto t = sieve_norms(lambda + L + 1, Rational{1, 1});
        std::set<std::pair<std::int64_t, std::int64_t>> from_circles;
        for (const auto& e : t.entries) {
            if (std::abs(e.norm - lambda) > L) continue;
            for (const auto& p : circle_points(e.key)) from_circles.insert({p.xi1, p.xi2});
        }
        std::set<std::pair<std::int64_t, std::int64_t>> from_annulus;
        for (const auto& p : annulus_points(lambda, L, Rational{1, 1}))
            from_annulus.insert({p.xi.xi1, p.xi.xi2});
        CHECK(from_circles == from_annulus);
    }
}

TEST_CASE("rectangular totals equal the exact ellipse count") {
    const Rational aspect = Rational::make(2, 1);
    const auto t = sieve_norms(500.0, aspect);
    std::int64_t total = 0;
    for (const auto& e : t.entries) total += e.mult;
    std::int64_t ellipse = 0;  // 2 m^2 + k^2/2 <= 500, counted directly
    for (std::int64_t m = -20; m <= 20; ++m)
        for (std::int64_t k = -35; k <= 35; ++k)
            if (4 * m * m + k * k <= 1000) ++ellipse;
    CHECK(total == ellipse);
}

TEST_CASE("rectangular norms are exact rationals with collisions resolved") {
    const Rational aspect = Rational::make(2, 1);
    const auto t = sieve_norms(30.0, aspect);
    // key 20 = 4*1 + 16 = 4*4 + 4: shells (±1,±4) and (±2,±2) merge
    const auto pts = shell_points(aspect, 20);
    CHECK(pts.size() == 8);
    bool found = false;
    for (const auto& e : t.entries)
        if (e.key == 20) {
            found = true;
            CHECK(e.mult == 8);
            CHECK(e.norm == doctest::Approx(10.0));
        }
    CHECK(found);
    // norms strictly increasing
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.entries[i].key > t.entries[i - 1].key);
}

TEST_CASE("n_lambda") {
    const auto t = sieve_norms(100.0, Rational{1, 1});
    CHECK(n_lambda(7.3, t).key == 5);   // 6, 7 are not sums of two squares
    CHECK(n_lambda(2.0, t).key == 1);   // strict inequality
    CHECK(n_lambda(33.0, t).key == 32); // 33 = 3*11 is excluded
    CHECK_THROWS_AS(n_lambda(-1.0, t), std::invalid_argument);
    CHECK_THROWS_AS(n_lambda(0.0, t), std::invalid_argument);
}

TEST_CASE("consecutive gaps grow slower than n^0.4") {
    const auto t = sieve_norms(1e5, Rational{1, 1});
    double block_lo = 64.0;
    double first_ratio = 0.0, last_ratio = 0.0;
    while (block_lo < 1e5) {
        const double block_hi = std::min(2.0 * block_lo, 1e5);
        double max_gap = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double n = t.entries[i - 1].norm;
            if (n >= block_lo && n < block_hi)
                max_gap = std::max(max_gap, t.entries[i].norm - n);
        }
        const double ratio = max_gap / std::pow(block_lo, 0.4);
        if (first_ratio == 0.0) first_ratio = ratio;
        last_ratio = ratio;
        // blocks from 256 up sit strictly below n^0.4 (checked against an
        // independent enumeration; small blocks peak at ratio ~1.33)
        if (block_lo >= 256.0) CHECK(ratio < 1.0);
        block_lo = block_hi;
    }
    CHECK(last_ratio < 0.5 * first_ratio);
}

TEST_CASE("csv roundtrip is byte-stable and checksummed") {
    const auto t = sieve_norms(1e3, Rational{1, 1});
    const std::string csv1 = to_csv(t);
    const std::string csv2 = to_csv(sieve_norms(1e3, Rational{1, 1}));
    CHECK(csv1 == csv2);

    const auto back = from_csv(csv1, Rational{1, 1}, 1e3);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.entries[i].key == t.entries[i].key);
        CHECK(back.entries[i].mult == t.entries[i].mult);
    }
    std::string corrupted = csv1;
    corrupted[corrupted.find("1,4")] = '2';
    CHECK_THROWS(from_csv(corrupted, Rational{1, 1}, 1e3));

    // rectangular: half-integer norms survive the 17-digit roundtrip
    const Rational aspect = Rational::make(2, 1);
    const auto tr = sieve_norms(50.0, aspect);
    const auto back_r = from_csv(to_csv(tr), aspect, 50.0);
    REQUIRE(back_r.size() == tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(back_r.entries[i].key == tr.entries[i].key);
}

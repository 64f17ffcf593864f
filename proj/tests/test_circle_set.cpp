#include "rotlab/circle_set.hpp"
#include "rotlab/errors.hpp"

#include <doctest.h>

#include <random>

using namespace rotlab;

namespace {

Rational R(long a, long b = 1) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

using Raw = std::vector<std::pair<Rational, Rational>>;  // (start, length)

// Direct membership in a raw union of arcs, no normalization.
bool naive_contains(const Raw& raw, const Rational& x) {
    for (const auto& [start, length] : raw) {
        if (length >= 1) return true;
        Rational d = x - start;
        d -= Rational(floor(d));
        if (d < length) return true;
    }
    return false;
}

// Endpoints on the 1/64 grid: membership is constant on each cell, so the
// measure is the covered cell count over 64.
Rational grid_measure(const Raw& raw) {
    int covered = 0;
    for (int j = 0; j < 64; ++j) {
        if (naive_contains(raw, R(2 * j + 1, 128))) ++covered;
    }
    return R(covered, 64);
}

Raw random_raw(std::mt19937_64& rng, int count) {
    Raw raw;
    for (int i = 0; i < count; ++i) {
        Rational start = R(static_cast<long>(rng() % 128) - 32, 64);
        Rational length = R(static_cast<long>(rng() % 20), 64);
        raw.emplace_back(start, length);
    }
    return raw;
}

}  // namespace

TEST_CASE("basic arcs") {
    CHECK(CircleIntervalSet().empty());
    CHECK(CircleIntervalSet::full().is_full());
    CHECK(CircleIntervalSet::full().measure() == 1);
    CHECK(CircleIntervalSet::arc(R(1, 4), R(3, 2)).is_full());

    auto wrap = CircleIntervalSet::arc(R(7, 8), R(1, 4));
    REQUIRE(wrap.arcs().size() == 2);
    CHECK(wrap.arcs()[0].lo == 0);
    CHECK(wrap.arcs()[0].hi == R(1, 8));
    CHECK(wrap.arcs()[1].lo == R(7, 8));
    CHECK(wrap.arcs()[1].hi == 1);
    CHECK(wrap.measure() == R(1, 4));
    CHECK(wrap.contains(R(0)));
    CHECK(wrap.contains(R(15, 16)));
    CHECK(wrap.contains(R(-1, 16)));
    CHECK_FALSE(wrap.contains(R(1, 8)));  // half-open
    CHECK(wrap.contains(R(7, 8)));

    CHECK(CircleIntervalSet::arc(R(1, 2), R(0)).empty());
    CHECK_THROWS_AS(CircleIntervalSet::arc(R(0), R(-1)), ValidationError);
}

TEST_CASE("balls are half-open and merge on contact") {
    auto b = CircleIntervalSet::balls({{R(1, 4), R(1, 8)}, {R(1, 2), R(1, 8)}});
    REQUIRE(b.arcs().size() == 1);
    CHECK(b.arcs()[0].lo == R(1, 8));
    CHECK(b.arcs()[0].hi == R(5, 8));
    CHECK(b.contains(R(1, 8)));
    CHECK_FALSE(b.contains(R(5, 8)));
    // a ball around 0 wraps
    auto z = CircleIntervalSet::balls({{R(0), R(1, 10)}});
    CHECK(z.measure() == R(1, 5));
    CHECK(z.contains(R(19, 20)));
}

TEST_CASE("membership and measure against direct evaluation") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const Raw raw = random_raw(rng, 1 + trial % 9);
        const auto set = CircleIntervalSet::from_arcs(raw);
        CHECK(set.measure() == grid_measure(raw));
        for (int j = 0; j < 40; ++j) {
            const Rational x = R(static_cast<long>(rng() % 257), 256);
            CHECK(set.contains(x) == naive_contains(raw, x));
        }
        // normalized form: sorted, disjoint, non-adjacent
        for (std::size_t i = 1; i < set.arcs().size(); ++i) CHECK(set.arcs()[i - 1].hi < set.arcs()[i].lo);
    }
}

TEST_CASE("inclusion-exclusion for random sets") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const Raw ra = random_raw(rng, 1 + trial % 6);
        const Raw rb = random_raw(rng, 1 + trial % 5);
        const auto a = CircleIntervalSet::from_arcs(ra);
        const auto b = CircleIntervalSet::from_arcs(rb);
        const auto u = a.unite(b);
        const auto n = a.intersect(b);
        CHECK(u.measure() + n.measure() == a.measure() + b.measure());
        CHECK(u == b.unite(a));
        CHECK(n == b.intersect(a));
        Raw both = ra;
        both.insert(both.end(), rb.begin(), rb.end());
        CHECK(u == CircleIntervalSet::from_arcs(both));
        for (int j = 0; j < 20; ++j) {
            const Rational x = R(static_cast<long>(rng() % 129), 128);
            CHECK(n.contains(x) == (naive_contains(ra, x) && naive_contains(rb, x)));
        }
    }
}

TEST_CASE("certified membership") {
    auto s = CircleIntervalSet::arc(R(1, 4), R(1, 4));
    CHECK(s.contains_certified(R(3, 8), R(1, 100)) == Certainty::True);
    CHECK(s.contains_certified(R(3, 4), R(1, 100)) == Certainty::False);
    CHECK(s.contains_certified(R(1, 4), R(1, 100)) == Certainty::Undecided);
    CHECK(s.contains_certified(R(1, 4), R(0)) == Certainty::True);
    CHECK(s.contains_certified(R(1, 2), R(0)) == Certainty::False);
    // the seam at 0 is not a boundary when both sides are covered
    auto w = CircleIntervalSet::arc(R(3, 4), R(1, 2));
    CHECK(w.contains_certified(R(0), R(1, 100)) == Certainty::True);
    CHECK(CircleIntervalSet::full().contains_certified(R(1, 3), R(1, 10)) == Certainty::True);
    CHECK(CircleIntervalSet().contains_certified(R(1, 3), R(1, 10)) == Certainty::False);
}

TEST_CASE("ball gaps") {
    CHECK(min_ball_gap({}) == 1);
    CHECK(min_ball_gap({{R(1, 2), R(1, 10)}}) == 1);
    CHECK(min_ball_gap({{R(1, 10), R(1, 20)}, {R(3, 10), R(1, 20)}}) == R(1, 10));
    // neighbours across 0
    CHECK(min_ball_gap({{R(1, 20), R(1, 100)}, {R(19, 20), R(1, 100)}, {R(1, 2), R(0)}}) ==
          R(8, 100));
    CHECK(min_ball_gap({{R(1, 10), R(1, 10)}, {R(2, 10), R(1, 10)}}) < 0);
}

TEST_CASE("csv export") {
    auto s = CircleIntervalSet::arc(R(7, 8), R(1, 4));
    CHECK(s.to_csv() == "lo,hi\n0,1/8\n7/8,1\n");
}

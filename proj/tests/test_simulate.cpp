#include "oracle.hpp"

#include "rotlab/errors.hpp"
#include "rotlab/simulate.hpp"

#include <doctest.h>

using namespace rotlab;

TEST_CASE("splitmix64 reference outputs") {
    // first outputs for seed 1234567, from a Python port of the algorithm
    SplitMix64 g(1234567);
    CHECK(g.next() == 6457827717110365317ULL);
    CHECK(g.next() == 3203168211198807973ULL);
    CHECK(g.next() == 9817491932198370423ULL);
    CHECK(SplitMix64::at(1234567, 1) == 3203168211198807973ULL);
}

TEST_CASE("liminf experiment, golden theta, phi = 1, frozen values") {
    // recomputed independently with mpmath at 200 digits
    const std::uint64_t s_bits[] = {10451216379200822465ULL, 13757245211066428519ULL, 17911839290282890590ULL};
    const double r_ref[] = {0.038301087809045953, 0.059583449279282399, 0.03189025320387507};
    const std::uint64_t hits_1e3[] = {14, 13, 14};
    const std::uint64_t hits_1e4[] = {18, 17, 18};
    SimulationResult r = run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::constant(1), 3, {1000, 10000}, 1);
    REQUIRE(r.trajectories.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        const SampleTrajectory& t = r.trajectories[j];
        CHECK(t.s_bits == s_bits[j]);
        CHECK(t.s_bits == SplitMix64::at(1, j));
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(t.r_lo[c] <= r_ref[j] * (1 + 1e-15));
            CHECK(t.r_hi[c] >= r_ref[j] * (1 - 1e-15));
            CHECK(t.r_hi[c] - t.r_lo[c] <= 1e-9 * t.r_hi[c]);
        }
        CHECK(t.hits[0] == hits_1e3[j]);
        CHECK(t.hits[1] == hits_1e4[j]);
    }
    CHECK(r.seed == 1);
    CHECK(r.prng == "splitmix64");
}

TEST_CASE("trajectories are monotone and quantiles match the samples") {
    SimulationResult r = run_liminf_experiment(IrrationalSpec::linear(), PhiSpec::log_stack(1), 40,
                                               {10, 100, 1000, 10000}, 9);
    for (const auto& t : r.trajectories) {
        for (std::size_t c = 1; c < r.checkpoints.size(); ++c) {
            CHECK(t.r_hi[c] <= t.r_hi[c - 1]);
            CHECK(t.r_lo[c] <= t.r_lo[c - 1]);
            CHECK(t.hits[c] >= t.hits[c - 1]);
        }
    }
    REQUIRE(r.r_quantiles.size() == r.checkpoints.size());
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        std::vector<double> v;
        for (const auto& t : r.trajectories) v.push_back(t.r(c));
        std::sort(v.begin(), v.end());
        CHECK(r.r_quantiles[c].min == v.front());
        CHECK(r.r_quantiles[c].max == v.back());
        CHECK(r.r_quantiles[c].median == doctest::Approx(0.5 * (v[19] + v[20])));
        CHECK(r.medians()[c] == r.r_quantiles[c].median);
    }
}

TEST_CASE("results do not depend on the thread count") {
    SimulationOptions one;
    one.threads = 1;
    SimulationOptions four;
    four.threads = 4;
    const auto a = run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::log_stack(1), 30, {100, 5000}, 42, one);
    const auto b = run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::log_stack(1), 30, {100, 5000}, 42, four);
    const auto c = run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::log_stack(1), 30, {100, 5000}, 42, one);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(to_json(a).dump() == to_json(c).dump());
    CHECK(quantiles_csv(a) == quantiles_csv(b));
    const auto d = run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::log_stack(1), 30, {100, 5000}, 43, one);
    CHECK(to_json(a).dump() != to_json(d).dump());
}

TEST_CASE("s = 0 is approximated along the denominators") {
    // ||q_k theta|| < 1/q_{k+1}, so q_k ||q_k theta|| < 1
    SimulationResult r = run_liminf_targets(IrrationalSpec::golden(), PhiSpec::constant(1), {0}, {1000}, 0);
    CHECK(r.trajectories[0].r_hi[0] < 1);
    // q_k ||q_k theta|| stays above 1/3 and the minimum is at n = 1: (3 - sqrt 5)/2
    CHECK(r.trajectories[0].r(0) == doctest::Approx(0.3819660112501051).epsilon(1e-12));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::constant(1), 0, {10}, 1), ValidationError);
    CHECK_THROWS_AS(run_liminf_experiment(IrrationalSpec::golden(), PhiSpec::constant(1), 3, {100, 10}, 1),
                    ValidationError);
}

TEST_CASE("Minkowski counts for golden theta") {
    SimulationResult r = minkowski_check(IrrationalSpec::golden(), 50, 100000, 1);
    CHECK(r.checkpoints.back() == 100000);
    std::size_t increased = 0, pairs = 0;
    for (const auto& t : r.trajectories) {
        CHECK(t.hits.back() >= 1);
        for (std::size_t c = 1; c < r.checkpoints.size(); ++c) CHECK(t.hits[c] >= t.hits[c - 1]);
        for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
            for (std::size_t j = i + 1; j < r.checkpoints.size(); ++j) {
                if (r.checkpoints[j] != 4 * r.checkpoints[i]) continue;
                ++pairs;
                if (t.hits[j] > t.hits[i]) ++increased;
            }
        }
    }
    // recorded run: N -> 4N strictly increases in 491 of 750 (sample, N) pairs
    CHECK(pairs == 750);
    CHECK(increased == 491);
}

TEST_CASE("theta builder") {
    ThetaBuild p = theta_builder_squares(PhiSpec::power(1), 10);
    CHECK(p.quotients == std::vector<BigInt>{2, 2, 2, 1, 1, 1, 1, 1, 1, 1});
    for (std::size_t k = 1; k <= 10; ++k) CHECK(p.q[k] > BigInt(static_cast<unsigned long>(k * k)));

    ThetaBuild one = theta_builder_squares(PhiSpec::power(1), 1);
    CHECK(one.quotients == std::vector<BigInt>{2});

    // log q_k > k^2, with log clamped at 3 below its onset
    ThetaBuild l = theta_builder_squares(PhiSpec::log_stack(1), 6);
    CHECK(l.quotients == std::vector<BigInt>{1, 54, 148, 1092, 8100, 59871});
    oracle::Q ref = oracle::recurrence([&](std::size_t k) { return l.quotients[k - 1]; }, 6);
    for (std::size_t k = 1; k <= 6; ++k) {
        CHECK(l.q[k] == ref.q[k]);
        const double lq = std::log(std::max(3.0, ref.q[k].get_d()));
        CHECK(lq > static_cast<double>(k * k));
        // minimality: one less partial quotient misses the target
        if (k >= 2 && l.quotients[k - 1] > 1) {
            const mpz_class smaller = (l.quotients[k - 1] - 1) * ref.q[k - 1] + ref.q[k - 2];
            CHECK(std::log(std::max(3.0, smaller.get_d())) <= static_cast<double>(k * k));
        }
    }
    CHECK(to_json(l).contains("quotients"));

    CHECK_THROWS_AS(theta_builder_squares(PhiSpec::constant(4), 5), ConstructionError);
    CHECK_THROWS_AS(theta_builder_squares(PhiSpec::table({1, 2, 3}), 5), ConstructionError);
}

TEST_CASE("quantiles and Wilson intervals") {
    Quantiles q = quantiles({4, 1, 3, 2});
    CHECK(q.min == 1);
    CHECK(q.q25 == doctest::Approx(1.75));
    CHECK(q.median == doctest::Approx(2.5));
    CHECK(q.q75 == doctest::Approx(3.25));
    CHECK(q.max == 4);
    CHECK(median({5}) == 5);

    // z = 1.96 score interval, computed with Python floats
    auto [lo0, hi0] = wilson_interval(0, 10);
    CHECK(lo0 == 0);
    CHECK(hi0 == doctest::Approx(0.2775401687666166).epsilon(1e-14));
    auto [lo5, hi5] = wilson_interval(5, 10);
    CHECK(lo5 == doctest::Approx(0.23658959361548731).epsilon(1e-14));
    CHECK(hi5 == doctest::Approx(0.7634104063845126).epsilon(1e-14));
    auto [lo, hi] = wilson_interval(37, 1000);
    CHECK(lo == doctest::Approx(0.02696102468045289).epsilon(1e-14));
    CHECK(hi == doctest::Approx(0.05058268341054474).epsilon(1e-14));
}

TEST_CASE("Borel-Cantelli statistic") {
    BorelCantelliResult empty = borel_cantelli_statistic(IrrationalSpec::golden(), PhiSpec::constant(4), 1, 10, 0, 1);
    CHECK(empty.rows.empty());
    CHECK(empty.samples == 0);

    BorelCantelliResult r = borel_cantelli_statistic(IrrationalSpec::golden(), PhiSpec::constant(4), 1, 16, 2000, 7);
    REQUIRE(r.rows.size() == 16);
    CHECK(r.disagreements == 0);
    CHECK(r.cross_checked == 200 * 16);
    MeasureLab lab(IrrationalSpec::golden(), PhiSpec::constant(4));
    double prev = 0;
    for (const auto& row : r.rows) {
        CHECK(row.mu.value() == lab.build_Gk(row.k).all.set.measure());
        CHECK(row.frequency == doctest::Approx(static_cast<double>(row.hits) / 2000));
        CHECK(row.cumulative_median >= prev);
        prev = row.cumulative_median;
    }
    CHECK(r.fraction_within() >= 0.8);
    // total hits against the summed measures
    double expected = 0, observed = 0;
    for (const auto& row : r.rows) {
        expected += row.mu.approx();
        observed += row.frequency;
    }
    CHECK(observed == doctest::Approx(expected).epsilon(0.1));
    CHECK(to_csv(r).rfind("k,", 0) == 0);
}

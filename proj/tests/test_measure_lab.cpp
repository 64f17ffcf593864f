#include "oracle.hpp"

#include "rotlab/errors.hpp"
#include "rotlab/measure.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace rotlab;

namespace {

Rational R(long a, long b = 1) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

const PhiSpec kC4 = PhiSpec::constant(4);
const PhiSpec kShiftedLog = PhiSpec::shifted(PhiSpec::log_stack(1), 4);

long double shifted_log(std::uint64_t n) {
    return std::max(4.0L, std::log(static_cast<long double>(std::max<std::uint64_t>(n, 3))));
}

std::size_t failures(const std::vector<AuditRecord>& recs) {
    std::size_t bad = 0;
    for (const auto& r : recs) {
        if (r.holds != Certainty::True) {
            ++bad;
            MESSAGE(r.id << " k=" << r.k << " " << to_string(r.holds));
        }
    }
    return bad;
}

std::size_t start_index(MeasureLab& lab) {
    lab.require(1);
    return first_nondegenerate_index(lab.table());
}

/// Count of 0 <= n < q with {n theta} in [a, b) mod 1, from the MPFR value of theta.
long enumerate(const oracle::Theta& theta, std::uint64_t q, const mpq_class& a, const mpq_class& len) {
    long count = 0;
    for (std::uint64_t n = 0; n < q; ++n) {
        mpq_class d = theta.frac(n) - a;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), d.get_num_mpz_t(), d.get_den_mpz_t());
        d -= fl;
        if (d < len) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("E_k examples, golden theta, phi = 4") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    // q_2 = 2, q_3 = 3: the single ball around 3 theta
    MeasuredSet e2 = lab.build_Ek(2);
    CHECK(e2.balls == 1);
    CHECK(e2.set.measure() == R(1, 6));

    // q_4 = 5, q_5 = 8: balls at 6, 7, 8 theta, pairwise at least ||2 theta|| apart
    MeasuredSet e4 = lab.build_Ek(4);
    CHECK(e4.balls == 3);
    const Rational sum = R(1, 2) * (R(1, 6) + R(1, 7) + R(1, 8));
    CHECK(e4.set.measure() == sum);
    CHECK(e4.measure().contains(sum));
    CHECK(e4.perturbation() < Rational(1, BigInt(1) << 60));

    // log(8/5) from mpmath
    const Rational log85 = oracle::decimal("0.47000362924573555365143717318967102798491130279681");
    CHECK(e4.set.measure() <= log85 / 2);
    CHECK(e4.set.measure() <= R(235, 1000));
}

TEST_CASE("E_k agrees with a grid sweep for q_{k+1} <= 200") {
    struct Case {
        IrrationalSpec spec;
        oracle::Theta::Kind kind;
        PhiSpec phi;
        std::function<long double(std::uint64_t)> phi_ld;
    };
    const Case cases[] = {
        {IrrationalSpec::golden(), oracle::Theta::Golden, kC4, [](std::uint64_t) { return 4.0L; }},
        {IrrationalSpec::linear(), oracle::Theta::Linear, kShiftedLog, shifted_log},
    };
    for (const auto& c : cases) {
        MeasureLab lab(c.spec, c.phi);
        oracle::Theta theta(c.kind, 128);
        std::size_t checked = 0;
        for (std::size_t k = start_index(lab); ; ++k) {
            lab.require(k);
            if (lab.table().q(k + 1) > 200) break;
            const MeasuredSet e = lab.build_Ek(k);
            const double grid = oracle::grid_measure(
                theta.value(), lab.table().q(k).get_ui(), lab.table().q(k + 1).get_ui(),
                [&](std::uint64_t n) { return 1.0L / (static_cast<long double>(n) * c.phi_ld(n)); });
            CHECK_MESSAGE(std::abs(e.set.measure().get_d() - grid) < 1e-6, "k=" << k);
            ++checked;
        }
        CHECK(checked >= 3);
    }
}

TEST_CASE("G_5 for golden theta, phi = 4") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    const GkStructure& g = lab.build_Gk(5);
    CHECK(g.q_k == 8);
    CHECK(g.q_k1 == 13);
    // 8 * 4 >= 13, so q* = q_k and b = a_6 = 1
    CHECK(g.q_star == 8);
    CHECK(g.b_next == 1);
    REQUIRE(g.layers.size() == 1);
    CHECK(g.layers[0].n_from == 5);
    CHECK(g.layers[0].n_to == 13);
    CHECK(g.layers[0].radius.value() == R(1, 416));
    CHECK(g.all.set.measure() == R(1, 26));
    CHECK(g.closed_form().value() == R(1, 26));
    CHECK(g.disjoint_certified());
}

TEST_CASE("q* = q_k forces b = a_{k+1}") {
    for (const auto& spec : {IrrationalSpec::golden(), IrrationalSpec::linear(), IrrationalSpec::constant(3)}) {
        MeasureLab lab(spec, kC4);
        std::size_t seen = 0;
        for (std::size_t k = start_index(lab); k < 8; ++k) {
            lab.require(k);
            if (lab.table().q(k + 1) > 100000) break;
            const GkStructure& g = lab.build_Gk(k);
            CHECK(g.q_star >= g.q_k);
            CHECK(g.q_star < g.q_k1);
            CHECK(g.b_next >= 1);
            CHECK(g.b_next <= lab.table().a(k + 1));
            // at k = 0, q_{-1} = 0 gives b = a_1 - 1
            if (g.q_star == g.q_k && k >= 1) {
                CHECK(g.b_next == lab.table().a(k + 1));
                ++seen;
            }
        }
        CHECK(seen > 0);
    }
}

TEST_CASE("q* matches a linear scan") {
    MeasureLab lab(IrrationalSpec::linear(), kShiftedLog);
    for (std::size_t k = 1; k <= 5; ++k) {
        lab.require(k);
        const std::uint64_t qk = lab.table().q(k).get_ui();
        const std::uint64_t qk1 = lab.table().q(k + 1).get_ui();
        std::uint64_t expect = qk;
        for (std::uint64_t n = qk; n < qk1; ++n) {
            if (static_cast<long double>(n) * shifted_log(n) < qk1) expect = n;
        }
        CHECK_MESSAGE(lab.q_star(k) == expect, "k=" << k);
    }
}

TEST_CASE("layer measures and the closed form") {
    MeasureLab lab(IrrationalSpec::linear(), kC4);
    lab.require(6);
    for (std::size_t k = 2; k <= 5; ++k) {
        const GkStructure& g = lab.build_Gk(k);
        CHECK(g.layers.size() == g.b_next);
        Rational total(0);
        for (const auto& layer : g.layers) {
            const BigInt x = g.q_k1 - layer.i * g.q_k;
            CHECK(layer.n_to == x);
            // radius 1/(8 x phi), q_k disjoint balls
            CHECK(layer.radius.value() == Rational(1) / Rational(BigInt(32 * x)));
            const Rational expect = Rational(g.q_k) / Rational(BigInt(16 * x));
            CHECK(layer.arcs.set.measure() == expect);
            total += expect;
        }
        CHECK(g.all.set.measure() == total);
        CHECK(g.closed_form().value() == total);
    }
}

TEST_CASE("every ball of G_k fits inside the matching E ball") {
    MeasureLab lab(IrrationalSpec::golden(), kShiftedLog);
    for (std::size_t k = 1; k <= 14; ++k) {
        const GkStructure& g = lab.build_Gk(k);
        for (const auto& layer : g.layers) {
            for (BigInt n = layer.n_from + 1; n <= layer.n_to; ++n) {
                const long double bound = 1.0L / (n.get_d() * shifted_log(n.get_ui()));
                CHECK(layer.radius.upper().get_d() <= bound * (1 + 1e-15L));
            }
        }
    }
}

TEST_CASE("inequality audits hold") {
    for (const auto& spec : {IrrationalSpec::golden(), IrrationalSpec::linear()}) {
        for (const auto& phi : {kC4, kShiftedLog}) {
            MeasureLab lab(spec, phi);
            std::size_t k_to = start_index(lab);
            while (true) {
                lab.require(k_to + 1);
                if (lab.table().q(k_to + 2) > 10000) break;
                ++k_to;
            }
            const auto recs = lab.audit_inequalities(start_index(lab), k_to);
            CHECK_MESSAGE(failures(recs) == 0, spec.describe() << " " << phi.describe());
            std::set<std::string> ids;
            for (const auto& r : recs) ids.insert(r.id);
            for (const char* id : {"lll1", "Gk_disjoint", "radius_bound", "Gk_closed_form", "ineq0", "Gk_in_Fk"}) {
                CHECK_MESSAGE(ids.count(id) == 1, id);
            }
        }
    }
}

TEST_CASE("lll1 at k = 4") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    const auto recs = lab.audit_inequalities(4, 4);
    bool found = false;
    for (const auto& r : recs) {
        if (r.id != "lll1") continue;
        found = true;
        CHECK(r.holds == Certainty::True);
        CHECK(r.rhs.approx() == doctest::Approx(0.2350018146).epsilon(1e-9));
    }
    CHECK(found);
}

TEST_CASE("quasi-independence") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 2; k <= 14; ++k) pairs.emplace_back(k - 1, k);
    pairs.emplace_back(4, 10);
    pairs.emplace_back(1, 14);
    const auto recs = lab.quasi_independence(pairs);
    REQUIRE(recs.size() == pairs.size());
    for (const auto& r : recs) {
        CHECK_MESSAGE(r.holds == Certainty::True, r.l << "," << r.k);
        // the intersection measure, recomputed from the stored sets
        const Rational inter = lab.build_Gk(r.k).all.set.intersect(lab.build_Gk(r.l).all.set).measure();
        CHECK(r.lhs.value() == inter);
    }
    // k - l = 6: slack term is 6/8 of mu(G_k)
    const auto& six = recs[recs.size() - 2];
    const Rational mk = lab.build_Gk(10).all.set.measure();
    const Rational ml = lab.build_Gk(4).all.set.measure();
    CHECK(abs(six.rhs.value() - (mk * ml + R(6, 8) * mk)) <= six.rhs.error_bound());
    CHECK_THROWS_AS(lab.quasi_independence({{5, 5}}), ValidationError);
}

TEST_CASE("Denjoy-Koksma counts") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    oracle::Theta theta(oracle::Theta::Golden, 256);

    DenjoyKoksmaResult half = lab.denjoy_koksma_count(R(0), R(1, 2), 10);
    CHECK(half.q_k == 89);
    CHECK(half.expected == R(89, 2));
    CHECK(half.count >= 43);
    CHECK(half.count <= 46);
    CHECK(half.count == enumerate(theta, 89, 0, mpq_class(1, 2)));
    CHECK(half.holds);

    DenjoyKoksmaResult full = lab.denjoy_koksma_count(R(1, 3), R(1), 12);
    CHECK(full.count == full.q_k);
    CHECK(full.holds);

    std::mt19937_64 rng(17);
    for (std::size_t k : {8u, 12u, 16u}) {
        lab.require(k);
        const BigInt qk = lab.table().q(k);
        for (int trial = 0; trial < 10; ++trial) {
            const Rational start = R(static_cast<long>(rng() % 100000), 100000);
            DenjoyKoksmaResult tiny = lab.denjoy_koksma_count(start, Rational(1) / Rational(qk), k);
            CHECK(tiny.count <= 2);
            CHECK(tiny.holds);
            const Rational len = R(static_cast<long>(rng() % 99999 + 1), 100000);
            DenjoyKoksmaResult r = lab.denjoy_koksma_count(start, len, k);
            CHECK(r.count == enumerate(theta, qk.get_ui(), start, len));
            CHECK(r.holds);
        }
    }
    CHECK_THROWS_AS(lab.denjoy_koksma_count(R(0), R(0), 5), ValidationError);
}

TEST_CASE("errors") {
    MeasureOptions small;
    small.cap_arcs = 10;
    MeasureLab lab(IrrationalSpec::golden(), kC4, small);
    CHECK_THROWS_AS(lab.build_Ek(8), ResourceError);
    CHECK_THROWS_AS(lab.build_Gk(8), ResourceError);
    MeasureLab g(IrrationalSpec::golden(), kC4);
    // q_0 = q_1 = 1
    g.require(1);
    CHECK(first_nondegenerate_index(g.table()) == 1);
    CHECK_THROWS_AS(g.build_Gk(0), ValidationError);
    CHECK_THROWS_AS(g.build_Ek(0), ValidationError);
    MeasureOptions short_table;
    short_table.cap_k = 5;
    MeasureLab s(IrrationalSpec::golden(), kC4, short_table);
    CHECK_THROWS_AS(s.build_Ek(10), ResourceError);
}

TEST_CASE("serialization") {
    MeasureLab lab(IrrationalSpec::golden(), kC4);
    auto j = to_json(lab.build_Gk(5));
    CHECK(j.contains("q_star"));
    auto recs = lab.audit_inequalities(3, 3);
    REQUIRE(!recs.empty());
    auto a = to_json(recs.front());
    CHECK(a["holds"] == true);
    CHECK(a["status"] == "holds");
}

#include "oracle.hpp"

#include "rotlab/criterion.hpp"
#include "rotlab/simulate.hpp"

#include <doctest.h>

using namespace rotlab;

namespace {

const PhiSpec kLog1 = PhiSpec::log_stack(1);
const PhiSpec kShiftedLog = PhiSpec::shifted(PhiSpec::log_stack(1), 4);

IrrationalSpec squares_theta(const PhiSpec& phi, std::size_t k) {
    // one extra built quotient so the last term still sees the construction
    return theta_builder_squares(phi, k + 1).spec;
}

}  // namespace

TEST_CASE("main series, golden theta, phi = 4") {
    SeriesReport r = main_series(IrrationalSpec::golden(), PhiSpec::constant(4), 200);
    CHECK(r.classification == Trend::Diverging);
    REQUIRE(r.rows.size() == 201);
    // log(golden ratio)/4 from mpmath
    const Rational limit = oracle::decimal("0.12030295626490086187443972835609210578379608359642");
    for (std::size_t k = 100; k <= 200; ++k) CHECK(abs(r.rows[k].term.value() - limit) < Rational(1, BigInt(1) << 100));
    // partial sums grow linearly: S_200 / 200 is close to the limit
    const Rational mean = r.partial_sums.front().second.value() / 200;
    CHECK(abs(mean - limit) < Rational(1, 100));
    CHECK(r.rows[5].q_k.value() == 8);
    CHECK(r.rows[5].phi_qk->value() == 4);
}

TEST_CASE("term values follow the definition") {
    // golden, phi = log: t_k = log(min(log q_k, q_{k+1}/q_k)) / log q_k, checked against doubles
    SeriesReport r = main_series(IrrationalSpec::golden(), kLog1, 40);
    oracle::Q q = oracle::recurrence([](std::size_t) { return mpz_class(1); }, 41);
    for (std::size_t k = 3; k <= 40; ++k) {
        const double lq = std::log(q.q[k].get_d() < 3 ? 3.0 : q.q[k].get_d());
        const double ratio = q.q[k + 1].get_d() / q.q[k].get_d();
        const double expect = std::log(std::min(lq, ratio)) / lq;
        CHECK(r.rows[k].term.approx() == doctest::Approx(expect).epsilon(1e-12));
    }
    SeriesReport s = shifted_series(IrrationalSpec::golden(), kLog1, 40);
    for (std::size_t k = 3; k <= 40; ++k) {
        const double lq = std::log(q.q[k].get_d() < 3 ? 3.0 : q.q[k].get_d());
        const double lq1 = std::log(q.q[k + 1].get_d());
        const double ratio = q.q[k + 1].get_d() / q.q[k].get_d();
        CHECK(s.rows[k].term.approx() == doctest::Approx(std::log(std::min(lq, ratio)) / lq1).epsilon(1e-12));
    }
}

TEST_CASE("phi(q_k) > k^2 gives small terms and a converging trend") {
    const PhiSpec phi = PhiSpec::power(1);
    const IrrationalSpec theta = squares_theta(phi, 40);
    SeriesReport r = main_series(theta, phi, 40);
    CHECK(r.classification == Trend::Converging);
    for (std::size_t k = 2; k <= 40; ++k) {
        const double bound = 2 * std::log(static_cast<double>(k)) / (static_cast<double>(k) * k);
        CHECK(r.rows[k].term.upper() <= from_double(bound));
    }
    SeriesReport s = shifted_series(theta, phi, 40);
    CHECK(s.classification == Trend::Converging);
}

TEST_CASE("bounded phi diverges for every theta") {
    const std::vector<IrrationalSpec> thetas = {IrrationalSpec::golden(), IrrationalSpec::constant(2),
                                                IrrationalSpec::constant(5), IrrationalSpec::linear(),
                                                IrrationalSpec::loglog_power(), squares_theta(kLog1, 60)};
    for (const auto& theta : thetas) {
        for (int c : {4, 100}) {
            SeriesReport r = main_series(theta, PhiSpec::constant(c), 60);
            CHECK_MESSAGE(r.classification == Trend::Diverging, theta.describe() << " c=" << c);
        }
    }
}

TEST_CASE("bounded-type theta and divergent Khinchin sums give a diverging trend") {
    const std::vector<IrrationalSpec> thetas = {IrrationalSpec::golden(), IrrationalSpec::constant(2),
                                                IrrationalSpec::constant(5)};
    const std::vector<PhiSpec> phis = {PhiSpec::constant(4), kLog1, PhiSpec::log_stack(2), kShiftedLog};
    for (const auto& theta : thetas) {
        CHECK(condition_i_check(theta, 200).trend == Growth::Bounded);
        for (const auto& phi : phis) {
            REQUIRE(khinchin_divergence_report(phi, 1 << 20).classification == Trend::Diverging);
            SeriesReport r = main_series(theta, phi, 200);
            CHECK_MESSAGE(r.classification == Trend::Diverging, theta.describe() << " " << phi.describe());
        }
    }
}

TEST_CASE("shifted series agrees with the main series") {
    SeriesReport m = main_series(IrrationalSpec::golden(), PhiSpec::constant(4), 100);
    SeriesReport s = shifted_series(IrrationalSpec::golden(), PhiSpec::constant(4), 100);
    for (std::size_t k = 0; k <= 100; ++k) CHECK(m.rows[k].term.value() == s.rows[k].term.value());
    CHECK(main_series(IrrationalSpec::golden(), kLog1, 200).classification == Trend::Diverging);
    CHECK(shifted_series(IrrationalSpec::golden(), kLog1, 200).classification == Trend::Diverging);
}

TEST_CASE("no main/shifted contradiction and nonnegative terms across the matrix") {
    const std::vector<IrrationalSpec> thetas = {IrrationalSpec::golden(), IrrationalSpec::constant(3),
                                                IrrationalSpec::linear(), IrrationalSpec::loglog_power(),
                                                squares_theta(kShiftedLog, 100)};
    const std::vector<PhiSpec> phis = {PhiSpec::constant(1), PhiSpec::constant(4), kLog1, kShiftedLog,
                                       PhiSpec::power(Rational(1, 2))};
    for (const auto& theta : thetas) {
        for (const auto& phi : phis) {
            SeriesReport m = main_series(theta, phi, 100);
            SeriesReport s = shifted_series(theta, phi, 100);
            const bool contradiction = (m.classification == Trend::Diverging && s.classification == Trend::Converging) ||
                                       (m.classification == Trend::Converging && s.classification == Trend::Diverging);
            CHECK_MESSAGE(!contradiction, theta.describe() << " " << phi.describe());
            for (std::size_t k = 1; k < m.rows.size(); ++k) {
                CHECK(less(m.rows[k].term, CertifiedReal(0)) != Certainty::True);
                CHECK(less(s.rows[k].term, CertifiedReal(0)) != Certainty::True);
            }
        }
    }
}

TEST_CASE("condition (i)") {
    ConditionIReport g = condition_i_check(IrrationalSpec::golden(), 100);
    CHECK(g.trend == Growth::Bounded);
    CHECK(g.fitted_c.approx() == doctest::Approx(1.6180339887).epsilon(1e-2));
    CHECK(g.fitted_c.approx() <= 1.6180339888);

    ConditionIReport five = condition_i_check(IrrationalSpec::constant(5), 100);
    CHECK(five.trend == Growth::Bounded);
    // (5 + sqrt 29) / 2
    CHECK(std::abs(five.fitted_c.approx() - 5.1925824035672520) < 0.01);

    ConditionIReport lin = condition_i_check(IrrationalSpec::linear(), 100);
    CHECK(lin.trend == Growth::Growing);
    // log q_k >= k log k - k + 1
    oracle::Q q = oracle::recurrence([](std::size_t k) { return mpz_class(static_cast<unsigned long>(k)); }, 100);
    for (std::size_t k = 2; k <= 100; ++k) {
        const double lq = mpz_sizeinbase(q.q[k].get_mpz_t(), 2) * std::log(2.0);  // upper bound on log q_k
        CHECK(lq >= k * std::log(static_cast<double>(k)) - k + 1);
    }
    CHECK(lin.fitted_c.approx() > 30);
}

TEST_CASE("condition (ii)") {
    ConditionIIReport lin = condition_ii_check(IrrationalSpec::linear(), 200, Rational(1));
    CHECK(lin.fitted_d.approx() <= 1.0);
    for (std::size_t k : lin.violations) CHECK(k < 100);

    ConditionIIReport g50 = condition_ii_check(IrrationalSpec::golden(), 50, Rational(1));
    ConditionIIReport g200 = condition_ii_check(IrrationalSpec::golden(), 200, Rational(1));
    CHECK(g200.fitted_d.approx() < g50.fitted_d.approx());
    // golden ratio / log q_100
    CHECK(g200.fitted_d.approx() == doctest::Approx(1.6180339887 / std::log(573147844013817084101.0)).epsilon(1e-9));
    // the window starts at k = 1, where q_1 = 1 has log q_1 = 0
    CHECK(g50.skipped == std::vector<std::size_t>{1});

    ConditionIIReport p2 = condition_ii_check(IrrationalSpec::loglog_power(), 60, Rational(1));
    CHECK(p2.ratios.size() == 59);
}

TEST_CASE("inverse log series") {
    CHECK(inverse_log_series(IrrationalSpec::loglog_power(), 1000).classification == Trend::Diverging);
    CHECK(inverse_log_series(IrrationalSpec::golden(), 500).classification == Trend::Diverging);
    SeriesReport dexp = inverse_log_series(IrrationalSpec::named_custom("double_exponential"), 25);
    CHECK(dexp.classification == Trend::Converging);
    CHECK(dexp.rows.front().k == 2);
    // log q_k >= 2^k log 2 makes every term at most 1/(2^k log 2)
    for (const auto& row : dexp.rows) {
        CHECK(row.term.upper() <= from_double(1.0 / (std::ldexp(1.0, static_cast<int>(row.k)) * std::log(2.0)) * (1 + 1e-12)));
    }
}

TEST_CASE("reports serialize") {
    SeriesReport r = main_series(IrrationalSpec::golden(), PhiSpec::constant(4), 10);
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("k,q_k,ratio,phi_qk,term,partial_sum\n", 0) == 0);
    auto j = to_json(r);
    CHECK(j["classification"] == "diverging-trend");
    CHECK(j["terms"].size() == 11);
    auto ci = to_json(condition_i_check(IrrationalSpec::golden(), 20));
    CHECK(ci.contains("fitted_C"));
}

#include "rotlab/convergents.hpp"

#include "rotlab/errors.hpp"

#include <map>

namespace rotlab {

ConvergentTable::ConvergentTable(IrrationalSpec spec) : spec_(std::move(spec)) {
    rows_.push_back(ConvergentRow{0, BigInt(0), BigInt(0), BigInt(1)});
}

const ConvergentRow& ConvergentTable::row(std::size_t k) const {
    if (k >= rows_.size()) {
        throw IndexError("convergent index " + std::to_string(k) + " beyond table (last " +
                         std::to_string(last_index()) + ")");
    }
    return rows_[k];
}

void ConvergentTable::push_next() {
    const std::size_t k = rows_.size();
    BigInt a = spec_.quotient(k);
    // p_{-1} = 1, q_{-1} = 0
    const BigInt p_prev2 = k >= 2 ? rows_[k - 2].p : BigInt(1);
    const BigInt q_prev2 = k >= 2 ? rows_[k - 2].q : BigInt(0);
    BigInt p = a * rows_[k - 1].p + p_prev2;
    BigInt q = a * rows_[k - 1].q + q_prev2;
    rows_.push_back(ConvergentRow{k, std::move(a), std::move(p), std::move(q)});
}

void ConvergentTable::extend_to(std::size_t k, std::size_t cap_k) {
    if (k > cap_k) {
        throw ResourceError("convergent table cap exceeded: need k = " + std::to_string(k) +
                            ", cap " + std::to_string(cap_k));
    }
    while (rows_.size() <= k) push_next();
}

void ConvergentTable::extend_until(const std::function<bool(std::size_t, const BigInt&)>& pred,
                                   std::size_t cap_k) {
    for (const auto& r : rows_) {
        if (pred(r.k, r.q)) return;
    }
    while (true) {
        if (rows_.size() > cap_k) {
            throw ResourceError("convergent table cap k = " + std::to_string(cap_k) +
                                " exceeded before predicate held");
        }
        push_next();
        if (pred(rows_.back().k, rows_.back().q)) return;
    }
}

std::size_t ConvergentTable::extend_past_q(const BigInt& bound, std::size_t cap_k) {
    extend_until([&bound](std::size_t, const BigInt& q) { return q > bound; }, cap_k);
    for (const auto& r : rows_) {
        if (r.q > bound) return r.k;
    }
    throw ConsistencyError("extend_past_q");
}

std::size_t ConvergentTable::index_at_or_below(const BigInt& n) const {
    if (n < 1) throw ValidationError("index_at_or_below requires n >= 1");
    if (rows_.back().q <= n) {
        throw IndexError("table does not extend past " + n.get_str());
    }
    std::size_t lo = 0;
    std::size_t hi = rows_.size() - 1;  // q_hi > n, q_lo <= n
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (rows_[mid].q <= n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

ConvergentTable extend_table(const IrrationalSpec& spec,
                             const std::function<bool(std::size_t, const BigInt&)>& until,
                             std::size_t cap_k) {
    ConvergentTable table(spec);
    table.extend_until(until, cap_k);
    return table;
}

std::vector<std::string> verify_table_invariants(const ConvergentTable& table) {
    std::vector<std::string> bad;
    const auto& rows = table.rows();
    if (rows[0].p != 0 || rows[0].q != 1 || rows[0].a != 0) bad.emplace_back("row 0 is not (0, 0, 1)");
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const BigInt p_prev = k >= 1 ? rows[k - 1].p : BigInt(1);
        const BigInt q_prev = k >= 1 ? rows[k - 1].q : BigInt(0);
        const auto& next = rows[k + 1];
        if (next.a < 1) bad.push_back("a_" + std::to_string(k + 1) + " < 1");
        if (next.q != next.a * rows[k].q + q_prev) bad.push_back("q recurrence fails at k=" + std::to_string(k));
        if (next.p != next.a * rows[k].p + p_prev) bad.push_back("p recurrence fails at k=" + std::to_string(k));
        BigInt det = rows[k].p * next.q - next.p * rows[k].q;
        if (abs(det) != 1) bad.push_back("determinant != ±1 at k=" + std::to_string(k));
        if (k >= 1) {
            if (next.q < 2 * rows[k - 1].q) bad.push_back("q_{k+1} < 2 q_{k-1} at k=" + std::to_string(k));
            if (next.q <= rows[k].q) bad.push_back("q not increasing at k=" + std::to_string(k));
        }
    }
    return bad;
}

CertifiedReal theta_approx(const ConvergentTable& table, std::size_t m) {
    if (m + 1 > table.last_index()) {
        throw IndexError("theta_approx(m = " + std::to_string(m) + ") needs rows through m+1");
    }
    Rational value(table.p(m), table.q(m));
    value.canonicalize();
    Rational err(BigInt(1), table.q(m) * table.q(m + 1));
    err.canonicalize();
    return {value, err};
}

namespace {

ThetaApprox make_approx(const ConvergentTable& table, std::size_t m) {
    CertifiedReal t = theta_approx(table, m);
    return ThetaApprox{m, t.value(), t.error_bound()};
}

}  // namespace

ThetaApprox approx_within(const ConvergentTable& table, const Rational& max_error) {
    if (sgn(max_error) <= 0) throw ValidationError("approximation tolerance must be positive");
    for (std::size_t m = 0; m + 1 <= table.last_index(); ++m) {
        // 1 <= max_error * q_m q_{m+1}
        if (max_error * Rational(table.q(m) * table.q(m + 1)) >= 1) return make_approx(table, m);
    }
    throw ResourceError("convergent table too short for tolerance " + decimal_str(max_error, 4));
}

ThetaApprox approx_within(ConvergentTable& table, const Rational& max_error, std::size_t cap_k) {
    if (sgn(max_error) <= 0) throw ValidationError("approximation tolerance must be positive");
    std::size_t m = 0;
    while (true) {
        table.extend_to(m + 1, cap_k);
        if (max_error * Rational(table.q(m) * table.q(m + 1)) >= 1) return make_approx(table, m);
        ++m;
    }
}

CertifiedReal dist_to_target(const BigInt& n, const Rational& s, const ConvergentTable& table,
                             const Rational& tol) {
    if (sgn(tol) <= 0) throw ValidationError("tolerance must be positive");
    const BigInt n_abs = abs(n);
    for (std::size_t m = 0; m + 1 <= table.last_index(); ++m) {
        const BigInt qq = table.q(m) * table.q(m + 1);
        if (Rational(n_abs) > tol * Rational(qq)) continue;
        Rational x(n * table.p(m), table.q(m));
        x.canonicalize();
        Rational err(n_abs, qq);
        err.canonicalize();
        // ||.|| is 1-Lipschitz, so the bound on n theta carries over unchanged.
        return {dist_to_nearest_integer(x - s), err};
    }
    throw ResourceError("convergent table too short to evaluate ||n theta - s|| for n = " +
                        n.get_str() + " within " + decimal_str(tol, 4));
}

CertifiedReal dist_to_integer(const BigInt& n, const ConvergentTable& table, const Rational& tol) {
    return dist_to_target(n, Rational(0), table, tol);
}

std::vector<std::pair<std::size_t, BigInt>> ostrowski_digits(const BigInt& n,
                                                             const ConvergentTable& table) {
    std::vector<std::pair<std::size_t, BigInt>> digits;
    if (n <= 0) {
        if (n == 0) return digits;
        throw ValidationError("ostrowski_digits requires n >= 0");
    }
    BigInt rest = n;
    std::size_t k = table.index_at_or_below(n);
    while (sgn(rest) > 0) {
        if (k == 1 && table.q(1) == table.q(0)) k = 0;
        BigInt c = floor_div(rest, table.q(k));
        if (sgn(c) > 0) {
            rest -= c * table.q(k);
            digits.emplace_back(k, std::move(c));
        }
        if (k == 0) break;
        --k;
    }
    if (sgn(rest) != 0) throw ConsistencyError("ostrowski greedy left a remainder");
    return digits;
}

bool ostrowski_admissible(const std::vector<std::pair<std::size_t, BigInt>>& digits,
                          const ConvergentTable& table) {
    // With q_0 = q_1 the digit stored at index 0 is the q_1 digit of the usual expansion.
    const bool merged = table.size() > 1 && table.q(0) == table.q(1);
    std::map<std::size_t, BigInt> c;
    for (const auto& [k0, d] : digits) {
        const std::size_t k = merged && k0 == 0 ? 1 : k0;
        if (sgn(d) < 0 || c.count(k)) return false;
        c[k] = d;
    }
    for (const auto& [k, d] : c) {
        if (k + 1 > table.last_index()) return false;
        const BigInt& a_next = table.a(k + 1);
        if (d > a_next) return false;
        if (d == a_next && k >= 1) {
            auto below = c.find(k - 1);
            if (below != c.end() && sgn(below->second) != 0) return false;
        }
    }
    return true;
}

FixedPointOrbit::FixedPointOrbit(const ConvergentTable& table, std::uint64_t n_max)
    : n_max_(n_max) {
    Rational two128(BigInt(1) << 128);
    ThetaApprox t = approx_within(table, Rational(1) / two128);
    m_ = t.m;
    BigInt scaled = floor(t.value * two128);
    // 0 < theta < 1 so the step fits in 128 bits.
    u128 lo = static_cast<u128>(mpz_get_ui(BigInt(scaled & BigInt("18446744073709551615")).get_mpz_t()));
    BigInt high = scaled >> 64;
    u128 hi = static_cast<u128>(mpz_get_ui(high.get_mpz_t()));
    step_ = (hi << 64) | lo;
}

Rational FixedPointOrbit::units_to_rational(u128 units) {
    BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(units >> 64)));
    BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(units)));
    BigInt whole = (hi << 64) + lo;
    Rational out(whole, BigInt(1) << 128);
    out.canonicalize();
    return out;
}

}  // namespace rotlab

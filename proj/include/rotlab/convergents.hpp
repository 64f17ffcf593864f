#pragma once

#include "rotlab/certified.hpp"
#include "rotlab/irrational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rotlab {

struct ConvergentRow {
    std::size_t k = 0;
    BigInt a;
    BigInt p;
    BigInt q;
};

/// Exact table of (a_k, p_k, q_k) for k = 0..last_index(), with p_0 = 0, q_0 = 1.
///
/// Extension is single-threaded; a table that is no longer extended is safe to
/// read from any number of threads.
class ConvergentTable {
public:
    explicit ConvergentTable(IrrationalSpec spec);

    const IrrationalSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t last_index() const noexcept { return rows_.size() - 1; }

    const ConvergentRow& row(std::size_t k) const;
    const BigInt& a(std::size_t k) const { return row(k).a; }
    const BigInt& p(std::size_t k) const { return row(k).p; }
    const BigInt& q(std::size_t k) const { return row(k).q; }
    const std::vector<ConvergentRow>& rows() const noexcept { return rows_; }

    /// Appends rows through index k. Throws ResourceError if k > cap_k.
    void extend_to(std::size_t k, std::size_t cap_k);
    /// Appends rows until pred(k, q_k) holds for the last row (checked on existing rows first).
    void extend_until(const std::function<bool(std::size_t, const BigInt&)>& pred,
                      std::size_t cap_k);
    /// Extends until q_k > bound; returns that k.
    std::size_t extend_past_q(const BigInt& bound, std::size_t cap_k);

    /// Largest k with q_k <= n (n >= 1). Requires the table to extend past n.
    std::size_t index_at_or_below(const BigInt& n) const;

private:
    void push_next();

    IrrationalSpec spec_;
    std::vector<ConvergentRow> rows_;
};

inline constexpr std::size_t kDefaultCapK = 100000;

ConvergentTable extend_table(const IrrationalSpec& spec,
                             const std::function<bool(std::size_t, const BigInt&)>& until,
                             std::size_t cap_k = kDefaultCapK);

/// Violations of the recurrence, q_{k+1} >= 2 q_{k-1}, |p_k q_{k+1} - p_{k+1} q_k| = 1,
/// and strict growth of q_k (k >= 1). Empty when the table is sound.
std::vector<std::string> verify_table_invariants(const ConvergentTable& table);

/// p_m/q_m with error bound 1/(q_m q_{m+1}).
CertifiedReal theta_approx(const ConvergentTable& table, std::size_t m);

/// Rational approximation of theta with a certified error bound.
struct ThetaApprox {
    std::size_t m = 0;
    Rational value;
    Rational error;
};

/// Smallest convergent index m with 1/(q_m q_{m+1}) <= max_error (extends the table).
ThetaApprox approx_within(ConvergentTable& table, const Rational& max_error, std::size_t cap_k);
/// Same, without extension; throws ResourceError when the table is too short.
ThetaApprox approx_within(const ConvergentTable& table, const Rational& max_error);

/// ||n theta|| with error bound <= tol.
CertifiedReal dist_to_integer(const BigInt& n, const ConvergentTable& table, const Rational& tol);
/// ||n theta - s|| with error bound <= tol.
CertifiedReal dist_to_target(const BigInt& n, const Rational& s, const ConvergentTable& table,
                             const Rational& tol);

/// Greedy Ostrowski digits (k, c_k), highest k first, zero digits omitted.
/// When q_0 = q_1 (a_1 = 1) the lower index is used for that denominator.
std::vector<std::pair<std::size_t, BigInt>> ostrowski_digits(const BigInt& n,
                                                             const ConvergentTable& table);

/// True if the digits satisfy c_k <= a_{k+1} and (c_k = a_{k+1} => c_{k-1} = 0).
bool ostrowski_admissible(const std::vector<std::pair<std::size_t, BigInt>>& digits,
                          const ConvergentTable& table);

/// Certified fixed-point model of the orbit n -> {n theta}, 0 <= n <= n_max.
///
/// Positions are unsigned 128-bit fractions of the circle (unit = 2^-128). The
/// stored step differs from 2^128 theta by at most 2 units, so position(n) is
/// within 2n units of the true point.
class FixedPointOrbit {
public:
    using u128 = unsigned __int128;

    FixedPointOrbit(const ConvergentTable& table, std::uint64_t n_max);

    u128 step() const noexcept { return step_; }
    std::uint64_t n_max() const noexcept { return n_max_; }
    u128 position(std::uint64_t n) const noexcept { return step_ * static_cast<u128>(n); }
    /// Bound on |position(n) - 2^128 {n theta}| in units (circle metric).
    u128 error_units(std::uint64_t n) const noexcept { return static_cast<u128>(n) * 2; }
    std::size_t convergent_index() const noexcept { return m_; }

    /// Circle distance between two positions, in units (<= 2^127).
    static u128 circle_distance(u128 a, u128 b) noexcept {
        u128 d = a - b;
        u128 e = b - a;
        return d < e ? d : e;
    }
    /// Position of a dyadic target s = bits / 2^64.
    static u128 target_units(std::uint64_t bits) noexcept { return static_cast<u128>(bits) << 64; }
    static Rational units_to_rational(u128 units);

private:
    u128 step_ = 0;
    std::uint64_t n_max_ = 0;
    std::size_t m_ = 0;
};

}  // namespace rotlab

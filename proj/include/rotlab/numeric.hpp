#pragma once

// Exact integer/rational types and directed-rounding transcendental bounds.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace rotlab {

using BigInt = mpz_class;
using Rational = mpq_class;

enum class Round { Down, Up, Nearest };

mpfr_rnd_t to_mpfr(Round r) noexcept;

/// Owning wrapper around an mpfr_t.
class MpfrNumber {
public:
    explicit MpfrNumber(unsigned prec_bits);
    MpfrNumber(const MpfrNumber& other);
    MpfrNumber& operator=(const MpfrNumber& other);
    MpfrNumber(MpfrNumber&& other) noexcept;
    MpfrNumber& operator=(MpfrNumber&& other) noexcept;
    ~MpfrNumber();

    mpfr_ptr get() noexcept { return value_; }
    mpfr_srcptr get() const noexcept { return value_; }
    unsigned precision() const noexcept;

    /// Exact conversion: every finite mpfr value is a dyadic rational.
    Rational to_rational() const;
    double to_double(Round r) const;

private:
    mpfr_t value_;
    bool live_ = false;
};

// Directed bounds. `prec` is the working precision in bits.
Rational log_bound(const Rational& x, Round r, unsigned prec);
Rational exp_bound(const Rational& x, Round r, unsigned prec);

/// Rounds x to a dyadic rational with `prec` significant bits.
Rational round_dyadic(const Rational& x, Round r, unsigned prec);

double to_double(const Rational& x, Round r);
Rational from_double(double x);

BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt ceil_div(const BigInt& a, const BigInt& b);
BigInt floor(const Rational& x);
BigInt ceil(const Rational& x);

/// Fractional part in [0, 1).
Rational frac(const Rational& x);
/// Distance to the nearest integer, in [0, 1/2].
Rational dist_to_nearest_integer(const Rational& x);

/// "p/q" (or "p" for integers).
std::string rational_str(const Rational& x);

/// Decimal with `sig` significant digits, rounded in direction r.
std::string decimal_str(const Rational& x, int sig, Round r = Round::Nearest);

/// Accepts "p/q", integers, and plain decimals ("0.25", "1e-3") exactly.
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

/// Smallest m with 2^m >= x (x > 0); 0 for x <= 1.
std::size_t ceil_log2(const Rational& x);

}  // namespace rotlab

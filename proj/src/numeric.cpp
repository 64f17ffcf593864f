#include "rotlab/numeric.hpp"

#include "rotlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <utility>

namespace rotlab {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Index: return "index";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Precision: return "precision";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

mpfr_rnd_t to_mpfr(Round r) noexcept {
    switch (r) {
    case Round::Down: return MPFR_RNDD;
    case Round::Up: return MPFR_RNDU;
    case Round::Nearest: return MPFR_RNDN;
    }
    return MPFR_RNDN;
}

MpfrNumber::MpfrNumber(unsigned prec_bits) {
    mpfr_init2(value_, static_cast<mpfr_prec_t>(prec_bits < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec_bits));
    mpfr_set_zero(value_, 1);
    live_ = true;
}

MpfrNumber::MpfrNumber(const MpfrNumber& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
    live_ = true;
}

MpfrNumber& MpfrNumber::operator=(const MpfrNumber& other) {
    if (this != &other) {
        mpfr_set_prec(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

MpfrNumber::MpfrNumber(MpfrNumber&& other) noexcept {
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
    live_ = true;
}

MpfrNumber& MpfrNumber::operator=(MpfrNumber&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
}

MpfrNumber::~MpfrNumber() {
    if (live_) mpfr_clear(value_);
}

unsigned MpfrNumber::precision() const noexcept {
    return static_cast<unsigned>(mpfr_get_prec(value_));
}

Rational MpfrNumber::to_rational() const {
    if (!mpfr_number_p(value_)) throw PrecisionError("non-finite mpfr value");
    if (mpfr_zero_p(value_)) return Rational(0);
    BigInt mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), value_);
    Rational out(mant);
    if (e >= 0) {
        mpq_mul_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
        mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return out;
}

double MpfrNumber::to_double(Round r) const {
    return mpfr_get_d(value_, to_mpfr(r));
}

Rational log_bound(const Rational& x, Round r, unsigned prec) {
    if (sgn(x) <= 0) throw ValidationError("log of non-positive value");
    MpfrNumber v(prec);
    // log is increasing: round the argument the same way as the result.
    mpfr_set_q(v.get(), x.get_mpq_t(), to_mpfr(r));
    mpfr_log(v.get(), v.get(), to_mpfr(r));
    return v.to_rational();
}

Rational exp_bound(const Rational& x, Round r, unsigned prec) {
    MpfrNumber v(prec);
    mpfr_set_q(v.get(), x.get_mpq_t(), to_mpfr(r));
    mpfr_exp(v.get(), v.get(), to_mpfr(r));
    return v.to_rational();
}

Rational round_dyadic(const Rational& x, Round r, unsigned prec) {
    MpfrNumber v(prec);
    mpfr_set_q(v.get(), x.get_mpq_t(), to_mpfr(r));
    return v.to_rational();
}

double to_double(const Rational& x, Round r) {
    MpfrNumber v(53);
    mpfr_set_q(v.get(), x.get_mpq_t(), to_mpfr(r));
    return v.to_double(r);
}

Rational from_double(double x) {
    if (!std::isfinite(x)) throw ValidationError("non-finite double");
    Rational out;
    mpq_set_d(out.get_mpq_t(), x);
    return out;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt out;
    mpz_fdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) {
    BigInt out;
    mpz_cdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

BigInt floor(const Rational& x) { return floor_div(x.get_num(), x.get_den()); }
BigInt ceil(const Rational& x) { return ceil_div(x.get_num(), x.get_den()); }

Rational frac(const Rational& x) { return x - Rational(floor(x)); }

Rational dist_to_nearest_integer(const Rational& x) {
    Rational f = frac(x);
    Rational g = Rational(1) - f;
    return f < g ? f : g;
}

std::string rational_str(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string decimal_str(const Rational& x, int sig, Round r) {
    if (sgn(x) == 0) return "0";
    if (sig < 1) sig = 1;
    const bool negative = sgn(x) < 0;
    const Rational mag = negative ? Rational(-x) : x;
    // Round away from zero when the direction and the sign agree.
    Round dir = r;
    if (negative && r != Round::Nearest) dir = r == Round::Up ? Round::Down : Round::Up;

    auto pow10 = [](long e) {
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
        return p;
    };
    auto scaled = [&](long e) { return e >= 0 ? Rational(mag / Rational(pow10(e))) : Rational(mag * Rational(pow10(e))); };
    // Decimal exponent of the leading digit: 10^e <= mag < 10^(e+1).
    long e = static_cast<long>(std::floor(std::log10(to_double(mag, Round::Nearest))));
    while (scaled(e) >= 10) ++e;
    while (scaled(e) < 1) --e;

    const Rational y = scaled(e - sig + 1);  // in [10^(sig-1), 10^sig)
    BigInt m;
    switch (dir) {
    case Round::Down: m = floor(y); break;
    case Round::Up: m = ceil(y); break;
    case Round::Nearest: m = floor(y + Rational(1, 2)); break;
    }
    if (m >= pow10(sig)) {
        m = floor_div(m, 10);
        ++e;
    }
    std::string digits = m.get_str();
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

    std::string out = negative ? "-" : "";
    if (e < -4 || e >= sig) {
        out += digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        const long ae = e < 0 ? -e : e;
        out += std::string(e < 0 ? "e-" : "e+") + (ae < 10 ? "0" : "") + std::to_string(ae);
    } else if (e < 0) {
        out += "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + digits;
    } else {
        const auto int_len = static_cast<std::size_t>(e + 1);
        if (digits.size() <= int_len) {
            out += digits + std::string(int_len - digits.size(), '0');
        } else {
            out += digits.substr(0, int_len) + "." + digits.substr(int_len);
        }
    }
    return out;
}

Rational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) throw ValidationError("empty number");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num = parse_bigint(s.substr(0, slash));
        BigInt den = parse_bigint(s.substr(slash + 1));
        if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
        Rational out(num, den);
        out.canonicalize();
        return out;
    }
    // Decimal: [sign] digits [. digits] [e [sign] digits]
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long scale = 0;
    bool any = false;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        digits.push_back(s[pos++]);
        any = true;
    }
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            digits.push_back(s[pos++]);
            --scale;
            any = true;
        }
    }
    if (!any) throw ValidationError("malformed number '" + s + "'");
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        std::string exp_text = s.substr(pos);
        if (exp_text.empty()) throw ValidationError("malformed exponent in '" + s + "'");
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            throw ValidationError("malformed exponent in '" + s + "'");
        }
        if (used != exp_text.size()) throw ValidationError("malformed exponent in '" + s + "'");
        if (e > 100000 || e < -100000) throw ValidationError("exponent out of range in '" + s + "'");
        scale += e;
        pos = s.size();
    }
    if (pos != s.size()) throw ValidationError("malformed number '" + s + "'");
    Rational out{BigInt(digits, 10)};
    BigInt p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale >= 0) {
        out *= Rational(p10);
    } else {
        out /= Rational(p10);
    }
    if (negative) out = -out;
    return out;
}

BigInt parse_bigint(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw ValidationError("empty integer");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw ValidationError("malformed integer '" + s + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw ValidationError("malformed integer '" + s + "'");
        }
    }
    if (s[0] == '+') s.erase(0, 1);
    return BigInt(s, 10);
}

std::size_t ceil_log2(const Rational& x) {
    if (x <= 1) return 0;
    BigInt c = ceil(x);
    std::size_t bits = mpz_sizeinbase(c.get_mpz_t(), 2);
    // 2^(bits-1) <= c < 2^bits
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, bits - 1);
    return (p >= c) ? bits - 1 : bits;
}

}  // namespace rotlab

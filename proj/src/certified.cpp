#include "rotlab/certified.hpp"

#include "rotlab/errors.hpp"

namespace rotlab {

namespace {

Rational abs_q(const Rational& x) { return sgn(x) < 0 ? Rational(-x) : x; }

}  // namespace

CertifiedReal::CertifiedReal(Rational value, Rational error_bound)
    : value_(std::move(value)), error_(std::move(error_bound)) {
    if (sgn(error_) < 0) throw ValidationError("negative error bound");
}

CertifiedReal CertifiedReal::from_bounds(const Rational& lo, const Rational& hi) {
    if (hi < lo) throw ValidationError("inverted bounds");
    return {(lo + hi) / 2, (hi - lo) / 2};
}

bool CertifiedReal::contains(const Rational& x) const {
    return abs_q(x - value_) <= error_;
}

CertifiedReal CertifiedReal::rounded(unsigned prec) const {
    Rational snapped = round_dyadic(value_, Round::Nearest, prec);
    Rational err = error_ + abs_q(snapped - value_);
    if (sgn(err) != 0) {
        // keep the bound itself cheap: round it up onto a short dyadic
        err = round_dyadic(err, Round::Up, 32);
    }
    return {snapped, err};
}

std::string CertifiedReal::to_string(int sig) const {
    return decimal_str(value_, sig, Round::Nearest) + " ± " + decimal_str(error_, 3, Round::Up);
}

double CertifiedReal::approx() const { return to_double(value_, Round::Nearest); }

CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b) {
    return {a.value_ + b.value_, a.error_ + b.error_};
}

CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b) {
    return {a.value_ - b.value_, a.error_ + b.error_};
}

CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b) {
    Rational err = abs_q(a.value_) * b.error_ + abs_q(b.value_) * a.error_ + a.error_ * b.error_;
    return {a.value_ * b.value_, err};
}

CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b) {
    Rational bmag = abs_q(b.value_);
    if (bmag <= b.error_) throw PrecisionError("division by an enclosure containing zero");
    Rational value = a.value_ / b.value_;
    if (a.is_exact() && b.is_exact()) return CertifiedReal(value);
    Rational err = (bmag * a.error_ + abs_q(a.value_) * b.error_) / (bmag * (bmag - b.error_));
    return {value, err};
}

CertifiedReal log(const CertifiedReal& x, unsigned prec) {
    Rational lo = x.lower();
    if (sgn(lo) <= 0) {
        if (sgn(x.upper()) <= 0) throw ValidationError("log of non-positive value");
        throw PrecisionError("log argument enclosure reaches zero");
    }
    if (x.is_exact() && x.value() == 1) return CertifiedReal(Rational(0));
    return CertifiedReal::from_bounds(log_bound(lo, Round::Down, prec),
                                      log_bound(x.upper(), Round::Up, prec));
}

CertifiedReal exp(const CertifiedReal& x, unsigned prec) {
    if (x.is_exact() && sgn(x.value()) == 0) return CertifiedReal(Rational(1));
    return CertifiedReal::from_bounds(exp_bound(x.lower(), Round::Down, prec),
                                      exp_bound(x.upper(), Round::Up, prec));
}

CertifiedReal min(const CertifiedReal& a, const CertifiedReal& b) {
    if (less_equal(a, b) == Certainty::True) return a;
    if (less_equal(b, a) == Certainty::True) return b;
    Rational lo = a.lower() < b.lower() ? a.lower() : b.lower();
    Rational hi = a.upper() < b.upper() ? a.upper() : b.upper();
    return CertifiedReal::from_bounds(lo, hi);
}

CertifiedReal max(const CertifiedReal& a, const CertifiedReal& b) {
    return -min(-a, -b);
}

Certainty less(const CertifiedReal& a, const CertifiedReal& b) {
    if (a.upper() < b.lower()) return Certainty::True;
    if (a.lower() >= b.upper()) return Certainty::False;
    return Certainty::Undecided;
}

Certainty less_equal(const CertifiedReal& a, const CertifiedReal& b) {
    if (a.upper() <= b.lower()) return Certainty::True;
    if (a.lower() > b.upper()) return Certainty::False;
    return Certainty::Undecided;
}

bool overlaps(const CertifiedReal& a, const CertifiedReal& b) {
    return !(a.upper() < b.lower() || b.upper() < a.lower());
}

}  // namespace rotlab

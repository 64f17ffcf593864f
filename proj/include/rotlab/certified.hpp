#pragma once

#include "rotlab/numeric.hpp"

#include <string>

namespace rotlab {

/// A rational approximation together with a rigorous bound on its distance to
/// the real number it stands for: |true - value| <= error_bound.
///
/// Every operation propagates the bound conservatively. Chains of products and
/// quotients grow denominators quickly; call rounded() to snap the value back
/// onto a dyadic grid (the snapping error is added to the bound).
class CertifiedReal {
public:
    CertifiedReal() = default;
    CertifiedReal(Rational value, Rational error_bound);
    CertifiedReal(const Rational& exact) : value_(exact) {}  // NOLINT(google-explicit-constructor)
    CertifiedReal(const BigInt& exact) : value_(exact) {}    // NOLINT(google-explicit-constructor)
    CertifiedReal(long exact) : value_(exact) {}             // NOLINT(google-explicit-constructor)

    static CertifiedReal from_bounds(const Rational& lo, const Rational& hi);

    const Rational& value() const noexcept { return value_; }
    const Rational& error_bound() const noexcept { return error_; }
    Rational lower() const { return value_ - error_; }
    Rational upper() const { return value_ + error_; }
    bool is_exact() const { return sgn(error_) == 0; }
    bool contains(const Rational& x) const;

    /// Value snapped to `prec` significant bits; bound widened by the snap.
    CertifiedReal rounded(unsigned prec) const;

    /// "value ± bound" with `sig` significant digits for the value.
    std::string to_string(int sig = 12) const;
    double approx() const;

    CertifiedReal operator-() const { return {-value_, error_}; }
    friend CertifiedReal operator+(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator-(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator*(const CertifiedReal& a, const CertifiedReal& b);
    friend CertifiedReal operator/(const CertifiedReal& a, const CertifiedReal& b);
    CertifiedReal& operator+=(const CertifiedReal& b) { return *this = *this + b; }

private:
    Rational value_{0};
    Rational error_{0};
};

CertifiedReal log(const CertifiedReal& x, unsigned prec);
CertifiedReal exp(const CertifiedReal& x, unsigned prec);
CertifiedReal min(const CertifiedReal& a, const CertifiedReal& b);
CertifiedReal max(const CertifiedReal& a, const CertifiedReal& b);

enum class Certainty { False, True, Undecided };

/// a < b decided on the enclosures.
Certainty less(const CertifiedReal& a, const CertifiedReal& b);
/// a <= b decided on the enclosures; exact equal values decide True.
Certainty less_equal(const CertifiedReal& a, const CertifiedReal& b);

/// Do the enclosures of a and b intersect (i.e. could they be equal)?
bool overlaps(const CertifiedReal& a, const CertifiedReal& b);

}  // namespace rotlab

#pragma once

#include "rotlab/certified.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rotlab {

/// A positive, nondecreasing test function phi on the positive integers,
/// extended to reals by phi(x) = phi(floor x).
class PhiSpec {
public:
    struct Constant {
        Rational c;
    };
    /// depth 1: log n; 2: log n loglog n; 3: log n loglog n logloglog n.
    /// Below `onset` the value is clamped to phi(onset).
    struct LogStack {
        int depth = 1;
        std::uint64_t onset = 3;
    };
    struct Power {
        Rational exponent;
    };
    /// phi(n) = values[n-1]; the last value extends to all larger n.
    struct Table {
        std::vector<Rational> values;
    };
    /// max(base(n), floor)
    struct Shifted {
        std::shared_ptr<const PhiSpec> base;
        Rational floor;
    };
    using Kind = std::variant<Constant, LogStack, Power, Table, Shifted>;

    static PhiSpec constant(Rational c);
    static PhiSpec log_stack(int depth);
    static PhiSpec log_stack(int depth, std::uint64_t onset);
    static PhiSpec power(Rational exponent);
    static PhiSpec table(std::vector<Rational> values);
    static PhiSpec shifted(PhiSpec base, Rational floor);
    /// Wraps in Shifted(., 4) unless phi >= 4 is already evident from the spec.
    static PhiSpec at_least_four(const PhiSpec& phi);

    /// Smallest n with log^{(max(1, depth-1))} n > 1: 3 for depths 1-2, 16 for depth 3.
    static std::uint64_t default_onset(int depth);

    const Kind& kind() const noexcept { return kind_; }
    std::string describe() const;
    bool is_bounded() const;
    /// Lower bound on inf phi that is evident from the spec (0 if none).
    Rational evident_floor() const;

    /// Directed enclosure of phi(n) at `prec` working bits.
    void bounds(const BigInt& n, unsigned prec, MpfrNumber& lo, MpfrNumber& hi) const;
    /// Fast double enclosure for n < 2^53.
    std::pair<double, double> double_bounds(std::uint64_t n) const;

private:
    explicit PhiSpec(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// phi(n) within tol (n >= 1). Precision is raised until the enclosure fits.
CertifiedReal eval_phi(const PhiSpec& phi, const BigInt& n, const Rational& tol);
/// phi(n) at a fixed working precision (enclosure width ~ 2^-prec relative).
CertifiedReal eval_phi_prec(const PhiSpec& phi, const BigInt& n, unsigned prec);
/// phi(x) = phi(floor x) for real x >= 1.
CertifiedReal eval_phi(const PhiSpec& phi, const Rational& x, const Rational& tol);

/// Precomputed double enclosures of phi(1..n_max).
class PhiBoundsTable {
public:
    PhiBoundsTable(const PhiSpec& phi, std::uint64_t n_max);
    double lo(std::uint64_t n) const { return lo_[n]; }
    double hi(std::uint64_t n) const { return hi_[n]; }
    std::uint64_t n_max() const noexcept { return lo_.size() - 1; }

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

}  // namespace rotlab

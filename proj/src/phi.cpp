#include "rotlab/phi.hpp"

#include "rotlab/errors.hpp"

#include <cmath>
#include <optional>
#include <tuple>

namespace rotlab {

PhiSpec PhiSpec::constant(Rational c) {
    if (sgn(c) <= 0) throw ValidationError("constant phi must be positive");
    return PhiSpec(Constant{std::move(c)});
}

std::uint64_t PhiSpec::default_onset(int depth) {
    switch (depth) {
    case 1:
    case 2: return 3;   // log n > 1  <=>  n >= 3
    case 3: return 16;  // log log n > 1  <=>  n > e^e ~ 15.15
    default: throw ValidationError("log-stack depth must be 1, 2 or 3");
    }
}

PhiSpec PhiSpec::log_stack(int depth) { return log_stack(depth, default_onset(depth)); }

PhiSpec PhiSpec::log_stack(int depth, std::uint64_t onset) {
    if (onset < default_onset(depth)) {
        throw ValidationError("log-stack onset " + std::to_string(onset) + " below " +
                              std::to_string(default_onset(depth)) +
                              " would make phi non-positive or non-monotone");
    }
    return PhiSpec(LogStack{depth, onset});
}

PhiSpec PhiSpec::power(Rational exponent) {
    if (sgn(exponent) <= 0) throw ValidationError("power exponent must be positive");
    return PhiSpec(Power{std::move(exponent)});
}

PhiSpec PhiSpec::table(std::vector<Rational> values) {
    if (values.empty()) throw ValidationError("phi table is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (sgn(values[i]) <= 0) throw ValidationError("phi table values must be positive");
        if (i > 0 && values[i] < values[i - 1]) {
            throw ValidationError("phi table must be nondecreasing (entry " + std::to_string(i + 1) + ")");
        }
    }
    return PhiSpec(Table{std::move(values)});
}

PhiSpec PhiSpec::shifted(PhiSpec base, Rational floor) {
    if (sgn(floor) <= 0) throw ValidationError("shift floor must be positive");
    return PhiSpec(Shifted{std::make_shared<const PhiSpec>(std::move(base)), std::move(floor)});
}

PhiSpec PhiSpec::at_least_four(const PhiSpec& phi) {
    if (phi.evident_floor() >= 4) return phi;
    return shifted(phi, Rational(4));
}

std::string PhiSpec::describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return "constant(" + rational_str(k.c) + ")";
            } else if constexpr (std::is_same_v<T, LogStack>) {
                std::string s = "logstack(" + std::to_string(k.depth);
                if (k.onset != default_onset(k.depth)) s += ",onset=" + std::to_string(k.onset);
                return s + ")";
            } else if constexpr (std::is_same_v<T, Power>) {
                return "power(" + rational_str(k.exponent) + ")";
            } else if constexpr (std::is_same_v<T, Table>) {
                return "table(" + std::to_string(k.values.size()) + " values)";
            } else {
                return "shifted(" + k.base->describe() + "," + rational_str(k.floor) + ")";
            }
        },
        kind_);
}

bool PhiSpec::is_bounded() const {
    return std::visit(
        [](const auto& k) -> bool {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Constant> || std::is_same_v<T, Table>) {
                return true;
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return k.base->is_bounded();
            } else {
                return false;
            }
        },
        kind_);
}

Rational PhiSpec::evident_floor() const {
    return std::visit(
        [](const auto& k) -> Rational {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return k.c;
            } else if constexpr (std::is_same_v<T, Table>) {
                return k.values.front();
            } else if constexpr (std::is_same_v<T, Power>) {
                return Rational(1);
            } else if constexpr (std::is_same_v<T, Shifted>) {
                Rational b = k.base->evident_floor();
                return b > k.floor ? b : k.floor;
            } else {
                return Rational(0);
            }
        },
        kind_);
}

namespace {

void set_max(MpfrNumber& target, const MpfrNumber& other, mpfr_rnd_t rnd) {
    if (mpfr_less_p(target.get(), other.get())) mpfr_set(target.get(), other.get(), rnd);
}

std::optional<Rational> exact_value(const PhiSpec& phi, const BigInt& n) {
    return std::visit(
        [&n](const auto& k) -> std::optional<Rational> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PhiSpec::Constant>) {
                return k.c;
            } else if constexpr (std::is_same_v<T, PhiSpec::Table>) {
                if (n >= k.values.size()) return k.values.back();
                return k.values[n.get_ui() - 1];
            } else if constexpr (std::is_same_v<T, PhiSpec::Power>) {
                if (n == 1) return Rational(1);
                if (k.exponent.get_den() == 1 && k.exponent.get_num() < 64) {
                    BigInt out;
                    mpz_pow_ui(out.get_mpz_t(), n.get_mpz_t(), k.exponent.get_num().get_ui());
                    return Rational(out);
                }
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, PhiSpec::Shifted>) {
                // Exact whenever the floor dominates an enclosure or the base is exact.
                auto base = exact_value(*k.base, n);
                if (base) return *base > k.floor ? *base : k.floor;
                CertifiedReal b = eval_phi_prec(*k.base, n, 64);
                if (b.upper() <= k.floor) return k.floor;
                return std::nullopt;
            } else {
                return std::nullopt;
            }
        },
        phi.kind());
}

}  // namespace

void PhiSpec::bounds(const BigInt& n, unsigned prec, MpfrNumber& lo, MpfrNumber& hi) const {
    if (n < 1) throw ValidationError("phi(n) requires n >= 1");
    mpfr_set_prec(lo.get(), prec);
    mpfr_set_prec(hi.get(), prec);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Constant>) {
                mpfr_set_q(lo.get(), k.c.get_mpq_t(), MPFR_RNDD);
                mpfr_set_q(hi.get(), k.c.get_mpq_t(), MPFR_RNDU);
            } else if constexpr (std::is_same_v<T, LogStack>) {
                BigInt m = n;
                if (m < k.onset) m = static_cast<unsigned long>(k.onset);
                MpfrNumber llo(prec), lhi(prec);
                mpfr_set_z(lo.get(), m.get_mpz_t(), MPFR_RNDD);
                mpfr_set_z(hi.get(), m.get_mpz_t(), MPFR_RNDU);
                mpfr_log(lo.get(), lo.get(), MPFR_RNDD);
                mpfr_log(hi.get(), hi.get(), MPFR_RNDU);
                mpfr_set(llo.get(), lo.get(), MPFR_RNDD);
                mpfr_set(lhi.get(), hi.get(), MPFR_RNDU);
                for (int d = 2; d <= k.depth; ++d) {
                    // next iterated log, multiplied into the product
                    mpfr_log(llo.get(), llo.get(), MPFR_RNDD);
                    mpfr_log(lhi.get(), lhi.get(), MPFR_RNDU);
                    if (mpfr_sgn(llo.get()) <= 0) throw PrecisionError("log-stack factor not positive");
                    mpfr_mul(lo.get(), lo.get(), llo.get(), MPFR_RNDD);
                    mpfr_mul(hi.get(), hi.get(), lhi.get(), MPFR_RNDU);
                }
            } else if constexpr (std::is_same_v<T, Power>) {
                MpfrNumber elo(prec), ehi(prec);
                mpfr_set_q(elo.get(), k.exponent.get_mpq_t(), MPFR_RNDD);
                mpfr_set_q(ehi.get(), k.exponent.get_mpq_t(), MPFR_RNDU);
                mpfr_set_z(lo.get(), n.get_mpz_t(), MPFR_RNDD);
                mpfr_set_z(hi.get(), n.get_mpz_t(), MPFR_RNDU);
                mpfr_log(lo.get(), lo.get(), MPFR_RNDD);  // >= 0 since n >= 1
                mpfr_log(hi.get(), hi.get(), MPFR_RNDU);
                mpfr_mul(lo.get(), lo.get(), elo.get(), MPFR_RNDD);
                mpfr_mul(hi.get(), hi.get(), ehi.get(), MPFR_RNDU);
                mpfr_exp(lo.get(), lo.get(), MPFR_RNDD);
                mpfr_exp(hi.get(), hi.get(), MPFR_RNDU);
            } else if constexpr (std::is_same_v<T, Table>) {
                const Rational& v = n >= k.values.size() ? k.values.back() : k.values[n.get_ui() - 1];
                mpfr_set_q(lo.get(), v.get_mpq_t(), MPFR_RNDD);
                mpfr_set_q(hi.get(), v.get_mpq_t(), MPFR_RNDU);
            } else {
                k.base->bounds(n, prec, lo, hi);
                MpfrNumber flo(prec), fhi(prec);
                mpfr_set_q(flo.get(), k.floor.get_mpq_t(), MPFR_RNDD);
                mpfr_set_q(fhi.get(), k.floor.get_mpq_t(), MPFR_RNDU);
                set_max(lo, flo, MPFR_RNDD);
                set_max(hi, fhi, MPFR_RNDU);
            }
        },
        kind_);
}

namespace {

// glibc's log and pow are accurate to within 1 ulp; a 2^-50 relative step is
// eight ulps of slack on each side.
double widen_down(double x) { return x - std::fabs(x) * 0x1p-50 - 0x1p-1000; }
double widen_up(double x) { return x + std::fabs(x) * 0x1p-50 + 0x1p-1000; }

std::pair<double, double> mpfr_double_bounds(const PhiSpec& phi, std::uint64_t n) {
    MpfrNumber lo(53), hi(53);
    phi.bounds(BigInt(static_cast<unsigned long>(n)), 53, lo, hi);
    return {lo.to_double(Round::Down), hi.to_double(Round::Up)};
}

}  // namespace

std::pair<double, double> PhiSpec::double_bounds(std::uint64_t n) const {
    if (n == 0) throw ValidationError("phi(n) requires n >= 1");
    if (n > (std::uint64_t{1} << 53)) return mpfr_double_bounds(*this, n);
    return std::visit(
        [&](const auto& k) -> std::pair<double, double> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return {to_double(k.c, Round::Down), to_double(k.c, Round::Up)};
            } else if constexpr (std::is_same_v<T, Table>) {
                const Rational& v = n >= k.values.size() ? k.values.back() : k.values[n - 1];
                return {to_double(v, Round::Down), to_double(v, Round::Up)};
            } else if constexpr (std::is_same_v<T, LogStack>) {
                const double x = static_cast<double>(n < k.onset ? k.onset : n);
                double llo = widen_down(std::log(x));
                double lhi = widen_up(std::log(x));
                double plo = llo;
                double phi_hi = lhi;
                for (int d = 2; d <= k.depth; ++d) {
                    llo = widen_down(std::log(llo));
                    lhi = widen_up(std::log(lhi));
                    if (!(llo > 0)) return mpfr_double_bounds(*this, n);
                    plo = widen_down(plo * llo);
                    phi_hi = widen_up(phi_hi * lhi);
                }
                return {plo, phi_hi};
            } else if constexpr (std::is_same_v<T, Power>) {
                const double x = static_cast<double>(n);
                return {widen_down(std::pow(x, to_double(k.exponent, Round::Down))),
                        widen_up(std::pow(x, to_double(k.exponent, Round::Up)))};
            } else {
                auto [lo, hi] = k.base->double_bounds(n);
                const double flo = to_double(k.floor, Round::Down);
                const double fhi = to_double(k.floor, Round::Up);
                return {lo > flo ? lo : flo, hi > fhi ? hi : fhi};
            }
        },
        kind_);
}

CertifiedReal eval_phi_prec(const PhiSpec& phi, const BigInt& n, unsigned prec) {
    if (n < 1) throw ValidationError("phi(n) requires n >= 1");
    if (auto exact = exact_value(phi, n)) return CertifiedReal(*exact);
    MpfrNumber lo(prec), hi(prec);
    phi.bounds(n, prec, lo, hi);
    return CertifiedReal::from_bounds(lo.to_rational(), hi.to_rational());
}

CertifiedReal eval_phi(const PhiSpec& phi, const BigInt& n, const Rational& tol) {
    if (sgn(tol) <= 0) throw ValidationError("tolerance must be positive");
    for (unsigned prec = 64; prec <= (1u << 16); prec *= 2) {
        CertifiedReal v = eval_phi_prec(phi, n, prec);
        if (v.error_bound() <= tol) return v;
    }
    throw PrecisionError("phi(" + n.get_str() + ") could not be enclosed within tolerance");
}

CertifiedReal eval_phi(const PhiSpec& phi, const Rational& x, const Rational& tol) {
    return eval_phi(phi, floor(x), tol);
}

PhiBoundsTable::PhiBoundsTable(const PhiSpec& phi, std::uint64_t n_max)
    : lo_(n_max + 1, 0.0), hi_(n_max + 1, 0.0) {
    for (std::uint64_t i = 1; i <= n_max; ++i) std::tie(lo_[i], hi_[i]) = phi.double_bounds(i);
}

}  // namespace rotlab

#include "rotlab/irrational.hpp"

#include "rotlab/errors.hpp"

#include <map>

namespace rotlab {

IrrationalSpec IrrationalSpec::constant(BigInt a) {
    if (a < 1) throw ValidationError("constant partial quotient must be >= 1");
    return IrrationalSpec(ConstantQuotient{std::move(a)});
}

IrrationalSpec IrrationalSpec::linear() { return IrrationalSpec(LinearQuotient{}); }

IrrationalSpec IrrationalSpec::loglog_power() { return IrrationalSpec(LogLogPower{}); }

IrrationalSpec IrrationalSpec::explicit_list(std::vector<BigInt> prefix, IrrationalSpec tail) {
    for (const auto& a : prefix) {
        if (a < 1) throw ValidationError("explicit partial quotients must be >= 1");
    }
    return IrrationalSpec(
        ExplicitList{std::move(prefix), std::make_shared<const IrrationalSpec>(std::move(tail))});
}

IrrationalSpec IrrationalSpec::custom(std::string name, std::function<BigInt(std::size_t)> rule) {
    if (!rule) throw ValidationError("custom rule is empty");
    return IrrationalSpec(Custom{std::move(name), std::move(rule)});
}

namespace {

const std::map<std::string, std::function<BigInt(std::size_t)>>& registry() {
    static const std::map<std::string, std::function<BigInt(std::size_t)>> rules = {
        // a_k = 2^(2^k)
        {"double_exponential",
         [](std::size_t k) {
             BigInt out = 1;
             mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), mp_bitcnt_t{1} << k);
             return out;
         }},
        // a_k = k^2
        {"square", [](std::size_t k) -> BigInt { return BigInt(k) * BigInt(k); }},
        // a_k = 2^k
        {"power_of_two",
         [](std::size_t k) {
             BigInt out = 1;
             mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), k);
             return out;
         }},
    };
    return rules;
}

}  // namespace

IrrationalSpec IrrationalSpec::named_custom(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw ValidationError("unknown custom rule '" + name + "'");
    return custom(name, it->second);
}

std::vector<std::string> IrrationalSpec::custom_rule_names() {
    std::vector<std::string> out;
    for (const auto& [name, rule] : registry()) out.push_back(name);
    return out;
}

BigInt loglog_power_quotient(std::size_t k) {
    if (k < 3) return 1;
    MpfrNumber x(256);
    MpfrNumber ll(256);
    mpfr_set_ui(x.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_log(x.get(), x.get(), MPFR_RNDN);   // log k
    mpfr_log(ll.get(), x.get(), MPFR_RNDN);  // log log k
    mpfr_mul(x.get(), x.get(), ll.get(), MPFR_RNDN);
    mpfr_exp(x.get(), x.get(), MPFR_RNDN);
    BigInt out;
    mpfr_get_z(out.get_mpz_t(), x.get(), MPFR_RNDN);
    return out < 1 ? BigInt(1) : out;
}

BigInt IrrationalSpec::quotient(std::size_t k) const {
    if (k == 0) return 0;
    BigInt a = std::visit(
        [k](const auto& kind) -> BigInt {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, ConstantQuotient>) {
                return kind.a;
            } else if constexpr (std::is_same_v<T, LinearQuotient>) {
                return BigInt(k);
            } else if constexpr (std::is_same_v<T, LogLogPower>) {
                return loglog_power_quotient(k);
            } else if constexpr (std::is_same_v<T, ExplicitList>) {
                if (k <= kind.prefix.size()) return kind.prefix[k - 1];
                return kind.tail->quotient(k);
            } else {
                return kind.rule(k);
            }
        },
        kind_);
    if (a < 1) {
        throw ValidationError("partial quotient a_" + std::to_string(k) + " = " + a.get_str() +
                              " is not positive (" + describe() + ")");
    }
    return a;
}

std::string IrrationalSpec::describe() const {
    return std::visit(
        [](const auto& kind) -> std::string {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, ConstantQuotient>) {
                return "constant(" + kind.a.get_str() + ")";
            } else if constexpr (std::is_same_v<T, LinearQuotient>) {
                return "linear";
            } else if constexpr (std::is_same_v<T, LogLogPower>) {
                return "loglog_power";
            } else if constexpr (std::is_same_v<T, ExplicitList>) {
                std::string s = "explicit[";
                for (std::size_t i = 0; i < kind.prefix.size(); ++i) {
                    if (i) s += ",";
                    if (i == 8 && kind.prefix.size() > 10) {
                        s += "...(" + std::to_string(kind.prefix.size()) + " terms)";
                        break;
                    }
                    std::string digits = kind.prefix[i].get_str();
                    s += digits.size() > 20 ? "~1e" + std::to_string(digits.size() - 1) : digits;
                }
                return s + "]+" + kind.tail->describe();
            } else {
                return "custom(" + kind.name + ")";
            }
        },
        kind_);
}

}  // namespace rotlab

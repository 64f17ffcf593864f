#pragma once

#include "rotlab/numeric.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rotlab {

/// Rule generating the partial quotients a_1, a_2, ... of an irrational in (0, 1).
/// a_0 is always 0. Specs are immutable values and cheap to copy.
class IrrationalSpec {
public:
    struct ConstantQuotient {
        BigInt a;
    };
    struct LinearQuotient {};
    /// a_k = round(k^{log log k}) for k >= 3; a_1 = a_2 = 1.
    struct LogLogPower {};
    struct ExplicitList {
        std::vector<BigInt> prefix;                   // a_1 .. a_len
        std::shared_ptr<const IrrationalSpec> tail;  // indexed by absolute k
    };
    struct Custom {
        std::string name;
        std::function<BigInt(std::size_t)> rule;
    };
    using Kind = std::variant<ConstantQuotient, LinearQuotient, LogLogPower, ExplicitList, Custom>;

    static IrrationalSpec golden() { return constant(1); }
    static IrrationalSpec constant(BigInt a);
    static IrrationalSpec linear();
    static IrrationalSpec loglog_power();
    static IrrationalSpec explicit_list(std::vector<BigInt> prefix, IrrationalSpec tail);
    static IrrationalSpec custom(std::string name, std::function<BigInt(std::size_t)> rule);
    /// Looks up a rule from the built-in registry (see custom_rule_names()).
    static IrrationalSpec named_custom(const std::string& name);
    static std::vector<std::string> custom_rule_names();

    /// a_k for k >= 1 (a_0 = 0). Throws ValidationError if the rule yields a_k < 1.
    BigInt quotient(std::size_t k) const;

    const Kind& kind() const noexcept { return kind_; }
    std::string describe() const;

private:
    explicit IrrationalSpec(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

/// round(k^{log log k}) computed at high precision (k >= 3).
BigInt loglog_power_quotient(std::size_t k);

}  // namespace rotlab

#pragma once

#include "rotlab/circle_set.hpp"
#include "rotlab/convergents.hpp"
#include "rotlab/phi.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rotlab {

struct MeasureOptions {
    unsigned precision_bits = 128;
    std::size_t cap_k = kDefaultCapK;
    std::size_t cap_arcs = 1000000;
};

/// A union of balls around orbit points, built exactly for a rational stand-in
/// of theta and dyadic stand-ins of the radii.
struct MeasuredSet {
    CircleIntervalSet set;
    std::size_t convergent_index = 0;  // theta replaced by p_m/q_m
    std::size_t balls = 0;
    Rational center_error;  // max |n theta - n p_m/q_m| over the balls
    Rational radius_error;  // max |true radius - used radius|

    /// Measure of the true set: measure(set) +- 2 * balls * (center_error + radius_error).
    CertifiedReal measure() const;
    Rational perturbation() const;
};

struct GkLayer {
    BigInt i;
    BigInt n_from;  // exclusive
    BigInt n_to;    // inclusive
    CertifiedReal radius;
    MeasuredSet arcs;
};

struct GkStructure {
    std::size_t k = 0;
    BigInt q_k;
    BigInt q_k1;
    BigInt q_star;
    BigInt b_next;
    CertifiedReal phi_qk1;
    std::vector<GkLayer> layers;
    MeasuredSet all;
    /// Smallest gap between distinct balls for the stand-in theta, with the
    /// shift the true configuration may differ by; disjoint iff gap - slack > 0.
    Rational min_gap;
    Rational gap_slack;

    bool disjoint_certified() const { return min_gap > gap_slack; }
    /// Sum of disjoint ball lengths: q_k / (4 phi(q_{k+1})) sum_i 1 / (q_{k+1} - i q_k).
    CertifiedReal closed_form() const;
};

struct AuditRecord {
    std::string id;
    std::size_t k = 0;
    std::string relation;  // "<=", "<", ">=", "=="
    CertifiedReal lhs;
    CertifiedReal rhs;
    Certainty holds = Certainty::Undecided;
    std::string note;
};

struct QuasiRecord {
    std::size_t l = 0;
    std::size_t k = 0;
    CertifiedReal lhs;  // mu(G_k cap G_l)
    CertifiedReal rhs;  // mu(G_k) mu(G_l) + 6 / 2^{(k-l)/2} mu(G_k)
    Certainty holds = Certainty::Undecided;
};

struct DenjoyKoksmaResult {
    std::size_t k = 0;
    BigInt q_k;
    BigInt count;
    Rational expected;    // q_k mu(I)
    Rational bound_low;   // expected - 2
    Rational bound_high;  // expected + 2
    bool holds = false;
};

/// Sets of the divergence argument for one (theta, phi). phi is raised to at
/// least 4 on construction.
class MeasureLab {
public:
    MeasureLab(IrrationalSpec theta, const PhiSpec& phi, MeasureOptions opt = {});

    const ConvergentTable& table() const noexcept { return table_; }
    const PhiSpec& phi() const noexcept { return phi_; }
    const MeasureOptions& options() const noexcept { return opt_; }
    /// Ensures q_0..q_{k+1} are available.
    void require(std::size_t k);

    /// Union of B(n theta, 1/(n phi(n))) over q_k < n <= q_{k+1}.
    MeasuredSet build_Ek(std::size_t k);
    /// max{n >= q_k : n phi(n) < q_{k+1}}, or q_k if q_k phi(q_k) >= q_{k+1}.
    BigInt q_star(std::size_t k);
    /// Layers G_{k,i}, 0 <= i < b_{k+1}. Requires q_k < q_{k+1}.
    const GkStructure& build_Gk(std::size_t k);

    std::vector<AuditRecord> audit_inequalities(std::size_t k_from, std::size_t k_to);
    std::vector<QuasiRecord> quasi_independence(const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
    /// Count of 0 <= n < q_k with x0 + n theta in the arc [start, start + length).
    DenjoyKoksmaResult denjoy_koksma_count(const Rational& start, const Rational& length, std::size_t k,
                                           const Rational& x0 = Rational(0));

    /// Certified phi(n).
    CertifiedReal phi_at(const BigInt& n) const;

private:
    MeasuredSet build_balls(const BigInt& n_from, const BigInt& n_to,
                            const std::function<CertifiedReal(const BigInt&)>& radius);

    ConvergentTable table_;
    PhiSpec phi_;
    MeasureOptions opt_;
    std::map<std::size_t, GkStructure> gk_;
};

/// Smallest k >= 1 with q_k < q_{k+1}; index 0 is degenerate when a_1 = 1.
std::size_t first_nondegenerate_index(const ConvergentTable& table);

const char* to_string(Certainty c) noexcept;

nlohmann::ordered_json to_json(const AuditRecord& r);
nlohmann::ordered_json to_json(const QuasiRecord& r);
nlohmann::ordered_json to_json(const DenjoyKoksmaResult& r);
nlohmann::ordered_json to_json(const GkStructure& g);

}  // namespace rotlab

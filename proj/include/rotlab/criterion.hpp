#pragma once

#include "rotlab/convergents.hpp"
#include "rotlab/phi.hpp"
#include "rotlab/series.hpp"

#include <cstddef>
#include <vector>

namespace rotlab {

struct CriterionOptions {
    unsigned precision_bits = 128;
    std::size_t cap_k = kDefaultCapK;
    TrendThresholds thresholds{};
};

/// t_k = log(min(phi(q_k), q_{k+1}/q_k)) / phi(q_k), k = 0..K_max.
SeriesReport main_series(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_max,
                         const CriterionOptions& opt = {});

/// Same numerator over phi(q_{k+1}).
SeriesReport shifted_series(const IrrationalSpec& theta, const PhiSpec& phi, std::size_t k_max,
                            const CriterionOptions& opt = {});

/// sum_{k >= 2} 1/log q_k.
SeriesReport inverse_log_series(const IrrationalSpec& theta, std::size_t k_max,
                          const CriterionOptions& opt = {});

enum class Growth { Bounded, Growing, Inconclusive };
const char* to_string(Growth g) noexcept;

struct ConditionIReport {
    CertifiedReal fitted_c;  // max_{1<=k<=K} q_k^{1/k}
    bool holds_up_to_k = true;
    /// q_k^{1/k} at dyadic checkpoints, largest k first
    std::vector<std::pair<std::size_t, CertifiedReal>> checkpoints;
    Growth trend = Growth::Inconclusive;
};

/// q_k <= C^k: report the smallest C that works up to K and whether q_k^{1/k} keeps growing.
ConditionIReport condition_i_check(const IrrationalSpec& theta, std::size_t k_max,
                                   const CriterionOptions& opt = {});

struct ConditionIIReport {
    CertifiedReal fitted_d;              // max over k in [K/2, K] of (q_{k+1}/q_k)/log q_k
    std::vector<std::size_t> violations; // k <= K with ratio certainly > D
    std::vector<std::size_t> undecided;  // k where the comparison with D was not certified
    std::vector<std::size_t> skipped;    // k with log q_k = 0
    std::vector<std::pair<std::size_t, CertifiedReal>> ratios;
};

/// q_{k+1}/q_k <= D log q_k: fitted D over the upper half of the window and violations of a given D.
ConditionIIReport condition_ii_check(const IrrationalSpec& theta, std::size_t k_max,
                                     const Rational& d, const CriterionOptions& opt = {});

nlohmann::ordered_json to_json(const ConditionIReport& r);
nlohmann::ordered_json to_json(const ConditionIIReport& r);

}  // namespace rotlab
